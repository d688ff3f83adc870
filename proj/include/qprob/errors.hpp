#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace qprob {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PartitionError : public Error {
 public:
  enum class Kind {
    non_increasing,
    out_of_range,
    asymmetric,
    duplicate_label,
    label_count,
  };

  PartitionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Raised when a constraint update leaves an empty interval.
class Contradiction : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(std::string name)
      : Error("unknown node '" + name + "'"), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace qprob
