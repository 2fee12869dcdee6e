#pragma once

#include <stdexcept>
#include <string>

namespace phasecode {

// Raised when an input violates a documented precondition. The CLI maps
// this to exit status 2.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string &what) : std::invalid_argument(what) {}
};

} // namespace phasecode
