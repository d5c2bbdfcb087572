#ifndef PREFRANK_ERRORS_HPP
#define PREFRANK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace prefrank {

/// Bad inputs: violated preconditions, inconsistent data, invalid configs.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file content. Messages carry the offending line number.
class ParseError : public ValidationError {
public:
  explicit ParseError(const std::string& what) : ValidationError(what) {}
};

/// Filesystem-level failures (missing file, unwritable output).
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace prefrank

#endif
