#pragma once

#include <stdexcept>
#include <string>

namespace htc {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid parameters or arguments outside an operation's domain.
class domain_error : public error {
 public:
  explicit domain_error(const std::string& msg) : error(msg) {}
};

/// Protocol parameters violate a feasibility bound. The message names the
/// bound that failed and its value.
class feasibility_error : public error {
 public:
  explicit feasibility_error(const std::string& msg) : error(msg) {}
};

/// Config file cannot be read, parsed, or refers to unknown keys.
class config_error : public error {
 public:
  explicit config_error(const std::string& msg) : error(msg) {}
};

}  // namespace htc
