#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace teamtab::cli {

enum ExitStatus : int {
  kOk = 0,          // valid / satisfied / success
  kNegative = 1,    // not valid / not satisfied / rejected
  kInputError = 2,  // parse, domain, logic mismatch, bad files, usage
  kResource = 3,    // node or search budget exhausted
  kInternal = 4,    // engine self-check failed
};

/// args excludes the program name. Standard output is written once, at the end.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teamtab::cli
