#pragma once

#include <stdexcept>
#include <string>

namespace opweight {

/// Failure categories surfaced by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
    invalid_input,
    numerical_failure,
    resource_limit,
    protocol_incomplete,
    config,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline Error invalid_input(const std::string& what) { return {ErrorKind::invalid_input, what}; }
inline Error numerical_failure(const std::string& what) { return {ErrorKind::numerical_failure, what}; }
inline Error resource_limit(const std::string& what) { return {ErrorKind::resource_limit, what}; }
inline Error config_error(const std::string& what) { return {ErrorKind::config, what}; }

}  // namespace opweight
