#pragma once

#include <stdexcept>
#include <string>

namespace tdgwf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape, range or finiteness violation in caller-supplied data.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A normal-equation system could not be factorized. `index` names the
// group (time domain) or frequency bin (frequency domain) that failed.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what_arg, long index)
      : Error(what_arg), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace detail
}  // namespace tdgwf
