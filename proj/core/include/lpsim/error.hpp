#ifndef LPSIM_ERROR_HPP
#define LPSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lpsim {

// Base for all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unreadable input file.
class FormatError : public Error {
public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Named input does not exist.
class MissingInputError : public Error {
public:
  explicit MissingInputError(const std::string& msg) : Error(msg) {}
};

// Raster layers that must share a grid layout do not.
class AlignmentError : public Error {
public:
  explicit AlignmentError(const std::string& msg) : Error(msg) {}
};

// Empty collection where at least one element is required.
class EmptyInputError : public Error {
public:
  explicit EmptyInputError(const std::string& msg) : Error(msg) {}
};

// Histogram category domains do not match.
class CategoryMismatchError : public Error {
public:
  explicit CategoryMismatchError(const std::string& msg) : Error(msg) {}
};

// Bad configuration value or a configuration that cannot produce output.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace lpsim

#endif
