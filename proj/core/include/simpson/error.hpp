#pragma once

#include <stdexcept>
#include <string>

namespace simpson {

// Raised when a metric is evaluated outside its domain: zero denominators,
// inadmissible smoothing constants, undefined logarithms.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised by the file readers; the message carries source name and line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simpson
