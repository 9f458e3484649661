#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace abe {

// Base of every error the library throws. kind() is the stable class name
// printed by the command line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define ABE_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    using Error::Error;                                             \
    const char* kind() const noexcept override { return #Name; }    \
  };

ABE_DEFINE_ERROR(InvalidArgument)
ABE_DEFINE_ERROR(FormatError)
ABE_DEFINE_ERROR(UnsatisfiablePolicy)
ABE_DEFINE_ERROR(PolicyNotSatisfied)
ABE_DEFINE_ERROR(UnknownAttribute)
ABE_DEFINE_ERROR(AuthenticationFailure)
ABE_DEFINE_ERROR(IoError)

#undef ABE_DEFINE_ERROR

// Policy text errors carry a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}
  const char* kind() const noexcept override { return "ParseError"; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ThresholdError : public ParseError {
 public:
  using ParseError::ParseError;
  const char* kind() const noexcept override { return "ThresholdError"; }
};

}  // namespace abe
