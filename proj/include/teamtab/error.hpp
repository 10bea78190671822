#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace teamtab {

enum class ErrorCode {
  IllFormed,
  Undualizable,
  DomainMismatch,
  Parse,
  Domain,
  WrongLogic,
  ForeignWorld,
  ResourceLimit,
  NotApplicable,
  NotSaturated,
  BadPath,
  ShapeMismatch,
  InvalidInput,
  Internal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Half-open byte range [begin, end) into parser input.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, const std::string& message)
      : Error(ErrorCode::Parse, message), span_(span) {}

  SourceSpan span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

}  // namespace teamtab
