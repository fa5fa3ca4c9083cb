#pragma once

#include <stdexcept>
#include <string>

namespace qf {

enum class ErrorCode {
  parse,     // malformed input text
  invalid,   // structurally well-formed but violates a surface invariant
  limit,     // configured resource limit exceeded (field order, precision, budget)
  usage,     // bad API usage (precondition violation)
  internal,  // broken internal invariant; always a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace qf
