#pragma once

#include <stdexcept>

namespace attrsig {

// Raised for invalid configuration, malformed files and broken invariants.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace attrsig
