#pragma once

// Concrete text syntax:
//   atoms      [a-z][a-zA-Z0-9_]*       negated atom  ~p
//   &  conjunction    |  splitting disjunction    ||  intuitionistic disjunction
//   <> diamond        [] box                      =(a1,...,an,q)  dependence atom
// Precedence from tightest: unary, &, |, ||. Binary operators associate left.

#include <string>
#include <string_view>

#include "teamtab/error.hpp"
#include "teamtab/formula.hpp"

namespace teamtab {

/// Strict NNF input: '~' may only precede an atom. Throws ParseError.
Formula parse(std::string_view text);

/// Accepts '~' before any subformula and drives it inward with dual().
/// Throws ParseError, or Error(Undualizable) for '~' over '||' or '=(...)'.
Formula nnf_import(std::string_view text);

/// Canonical text with minimal parentheses; parse(print(f)) == f.
std::string print(const Formula& phi);

}  // namespace teamtab
