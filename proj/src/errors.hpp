#pragma once

#include <stdexcept>
#include <string>

namespace dphc {

// Mirrors the dphc_status codes of the public C API one-to-one.
enum class Status : int {
  ok = 0,
  invalid_argument = 1,
  quadrature = 2,
  pole = 3,
  io = 4,
  malformed = 5,
  truncated = 6,
  checksum = 7,
  dimension = 8,
  diverged = 9,
  unknown = 10,
};

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& msg)
      : std::runtime_error(msg), status_(status) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

[[noreturn]] inline void fail(Status status, const std::string& msg) {
  throw Error(status, msg);
}

inline void require(bool cond, Status status, const std::string& msg) {
  if (!cond) fail(status, msg);
}

}  // namespace dphc
