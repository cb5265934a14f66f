#pragma once

#include <stdexcept>
#include <string>

namespace hillgate {

// Error classes map one-to-one onto CLI exit codes.
enum class Errc {
  usage = 2,
  unsupported = 3,
  geometry = 4,
  numerical = 5,
  timeout = 6,
  insufficient_data = 7,
  degenerate_ams = 8,
  invalid_input = 9,
  config = 10,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Timeout carries the simulated time reached before max_steps ran out.
class TimeoutError : public Error {
 public:
  TimeoutError(const std::string& what, double elapsed, long long steps)
      : Error(Errc::timeout, what), elapsed_(elapsed), steps_(steps) {}
  double elapsed() const noexcept { return elapsed_; }
  long long steps() const noexcept { return steps_; }

 private:
  double elapsed_;
  long long steps_;
};

[[noreturn]] inline void throw_usage(const std::string& what) { throw Error(Errc::usage, what); }
[[noreturn]] inline void throw_unsupported(const std::string& what) { throw Error(Errc::unsupported, what); }
[[noreturn]] inline void throw_geometry(const std::string& what) { throw Error(Errc::geometry, what); }
[[noreturn]] inline void throw_numerical(const std::string& what) { throw Error(Errc::numerical, what); }
[[noreturn]] inline void throw_invalid(const std::string& what) { throw Error(Errc::invalid_input, what); }

}  // namespace hillgate
