#pragma once

#include <stdexcept>
#include <string>

namespace bgs {

// Error categories map 1:1 onto CLI exit codes and C API status values.
enum class ErrorCategory : int { Config = 2, Data = 3, Numeric = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCategory::Config, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(ErrorCategory::Data, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorCategory::Numeric, msg);
}

}  // namespace bgs
