#pragma once

#include <stdexcept>
#include <string>

namespace pplfilter {

// Internal failure: a broken invariant or an I/O failure we did not expect.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unreadable files, malformed models, invalid flags,
// degenerate data. The CLI maps this to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace pplfilter
