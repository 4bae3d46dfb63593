#pragma once

#include <stdexcept>
#include <string>

namespace reiflab {

// Raised for violated preconditions and malformed input. Bound checks do not
// throw on a failed bound; they report it through CheckStatus instead.
class Error : public std::runtime_error
{
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace reiflab
