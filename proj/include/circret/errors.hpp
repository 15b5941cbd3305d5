#pragma once

#include <stdexcept>
#include <string>

namespace circret {

// Base for every domain error raised by the library. The CLI maps these to
// exit status 1; anything else is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownCategoryError : public ValidationError {
 public:
  explicit UnknownCategoryError(const std::string& label)
      : ValidationError("unknown device category: " + label), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class ArityOverflowError : public Error {
 public:
  ArityOverflowError(const std::string& device, std::size_t contacts,
                     std::size_t roles)
      : Error("device " + device + " touches " + std::to_string(contacts) +
              " nets but has only " + std::to_string(roles) + " pins"),
        device_(device) {}
  const std::string& device() const { return device_; }

 private:
  std::string device_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace circret
