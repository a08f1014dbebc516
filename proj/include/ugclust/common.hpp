#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ugclust {

using NodeId = std::int32_t;

/** Error category, doubles as the process exit code in the CLI. */
enum class ErrorKind : int {
  usage = 2,   // bad command line
  input = 3,   // unreadable or malformed input data
  domain = 4,  // parameter outside its documented domain
  cap = 5,     // configured work cap exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(ErrorKind::input, msg) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(ErrorKind::domain, msg) {}
};

struct CapError : Error {
  explicit CapError(const std::string& msg) : Error(ErrorKind::cap, msg) {}
};

}  // namespace ugclust
