#include "teamtab/parser.hpp"

#include <cctype>
#include <vector>

namespace teamtab {

namespace {

enum class Tok { Ident, Tilde, And, Or, IDis, Diamond, Box, DepOpen, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  SourceSpan span;
  std::string_view text;
};

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "proposition";
    case Tok::Tilde: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::IDis: return "'||'";
    case Tok::Diamond: return "'<>'";
    case Tok::Box: return "'[]'";
    case Tok::DepOpen: return "'=('";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto emit = [&](Tok kind, std::size_t len) {
    out.push_back({kind, {i, i + len}, text.substr(i, len)});
    i += len;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const char next = i + 1 < text.size() ? text[i + 1] : '\0';
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      emit(Tok::Ident, j - i);
    } else if (c == '~') {
      emit(Tok::Tilde, 1);
    } else if (c == '&') {
      emit(Tok::And, 1);
    } else if (c == '|') {
      next == '|' ? emit(Tok::IDis, 2) : emit(Tok::Or, 1);
    } else if (c == '<' && next == '>') {
      emit(Tok::Diamond, 2);
    } else if (c == '[' && next == ']') {
      emit(Tok::Box, 2);
    } else if (c == '=' && next == '(') {
      emit(Tok::DepOpen, 2);
    } else if (c == '(') {
      emit(Tok::LParen, 1);
    } else if (c == ')') {
      emit(Tok::RParen, 1);
    } else if (c == ',') {
      emit(Tok::Comma, 1);
    } else {
      throw ParseError({i, i + 1}, "unknown token '" + std::string(1, c) + "'");
    }
  }
  out.push_back({Tok::End, {text.size(), text.size()}, {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, bool extended) : tokens_(tokenize(text)), extended_(extended) {}

  Formula run() {
    Formula f = parse_idis();
    expect(Tok::End);
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(at.span, message);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) {
      fail(peek(), "expected " + std::string(describe(kind)) + ", found " +
                       std::string(describe(peek().kind)));
    }
    return take();
  }

  Formula parse_idis() {
    Formula f = parse_or();
    while (peek().kind == Tok::IDis) {
      take();
      f = Formula::idis(std::move(f), parse_or());
    }
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (peek().kind == Tok::Or) {
      take();
      f = Formula::disj(std::move(f), parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (peek().kind == Tok::And) {
      take();
      f = Formula::conj(std::move(f), parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    const Token& t = take();
    switch (t.kind) {
      case Tok::Tilde: {
        if (extended_) return dual(parse_unary());
        if (peek().kind != Tok::Ident) {
          fail(t, "negation may only be applied to a proposition");
        }
        return Formula::neg_atom(std::string(take().text));
      }
      case Tok::Diamond: return Formula::diamond(parse_unary());
      case Tok::Box: return Formula::box(parse_unary());
      case Tok::Ident: return Formula::atom(std::string(t.text));
      case Tok::LParen: {
        Formula f = parse_idis();
        if (peek().kind != Tok::RParen) fail(t, "unbalanced parenthesis");
        take();
        return f;
      }
      case Tok::DepOpen: {
        if (peek().kind == Tok::RParen) {
          throw ParseError({t.span.begin, peek().span.end}, "empty dependence atom");
        }
        std::vector<Formula> args{parse_idis()};
        while (peek().kind == Tok::Comma) {
          take();
          args.push_back(parse_idis());
        }
        if (peek().kind != Tok::RParen) fail(t, "unbalanced parenthesis in dependence atom");
        take();
        Formula consequent = std::move(args.back());
        args.pop_back();
        return Formula::dep(std::move(args), std::move(consequent));
      }
      case Tok::RParen: fail(t, "unbalanced parenthesis");
      default: fail(t, "unexpected " + std::string(describe(t.kind)));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  bool extended_;
};

// Higher binds tighter.
int precedence(Kind kind) {
  switch (kind) {
    case Kind::IDis: return 1;
    case Kind::Or: return 2;
    case Kind::And: return 3;
    default: return 4;
  }
}

void print_into(const Formula& phi, std::string& out);

void print_operand(const Formula& phi, bool parenthesize, std::string& out) {
  if (parenthesize) out += '(';
  print_into(phi, out);
  if (parenthesize) out += ')';
}

void print_into(const Formula& phi, std::string& out) {
  switch (phi.kind()) {
    case Kind::Atom: out += phi.name(); return;
    case Kind::NegAtom:
      out += '~';
      out += phi.name();
      return;
    case Kind::Diamond:
    case Kind::Box:
      out += phi.kind() == Kind::Diamond ? "<>" : "[]";
      print_operand(phi.inner(), precedence(phi.inner().kind()) < 4, out);
      return;
    case Kind::Dep: {
      out += "=(";
      bool first = true;
      for (const Formula& arg : phi.children()) {
        if (!first) out += ',';
        first = false;
        print_into(arg, out);
      }
      out += ')';
      return;
    }
    case Kind::And:
    case Kind::Or:
    case Kind::IDis: {
      const int own = precedence(phi.kind());
      print_operand(phi.left(), precedence(phi.left().kind()) < own, out);
      out += phi.kind() == Kind::And ? " & " : phi.kind() == Kind::Or ? " | " : " || ";
      print_operand(phi.right(), precedence(phi.right().kind()) <= own, out);
      return;
    }
  }
}

}  // namespace

Formula parse(std::string_view text) { return Parser(text, false).run(); }

Formula nnf_import(std::string_view text) { return Parser(text, true).run(); }

std::string print(const Formula& phi) {
  std::string out;
  print_into(phi, out);
  return out;
}

}  // namespace teamtab
