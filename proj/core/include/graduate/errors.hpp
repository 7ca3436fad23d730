#pragma once

#include <stdexcept>
#include <string>

namespace graduate {

/// Base of every error raised by the library. The category maps onto the
/// CLI exit codes (parse = 2, domain = 3, numerical = 4).
class Error : public std::runtime_error {
 public:
  enum class Category { kParse, kDomain, kNumerical };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }
  const char* category_name() const noexcept;

 private:
  Category category_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(Category::kParse, what) {}
  ParseError(const std::string& what, long line)
      : Error(Category::kParse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line of the offending input, or 0 when not tied to a line.
  long line() const noexcept { return line_; }

 private:
  long line_ = 0;
};

/// Structural problems with otherwise well-formed input (e.g. an age grid
/// with gaps). Reported with the parse category.
class SchemaError : public ParseError {
 public:
  explicit SchemaError(const std::string& what) : ParseError(what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Category::kDomain, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(Category::kNumerical, what) {}
};

inline const char* Error::category_name() const noexcept {
  switch (category_) {
    case Category::kParse:
      return "parse";
    case Category::kDomain:
      return "domain";
    case Category::kNumerical:
      return "numerical";
  }
  return "unknown";
}

}  // namespace graduate
