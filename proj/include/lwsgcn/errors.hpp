#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lwsgcn {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct IsolatedNode : Error {
  using Error::Error;
};

struct InvalidGraph : Error {
  using Error::Error;
};

struct EmptyGroup : Error {
  using Error::Error;
};

struct InvalidGrouping : Error {
  using Error::Error;
};

struct DegenerateSpec : Error {
  using Error::Error;
};

struct NodeOutOfRange : Error {
  using Error::Error;
};

struct StaleCache : Error {
  using Error::Error;
};

struct EmptyLabelSet : Error {
  using Error::Error;
};

struct EmptyEvalSet : Error {
  using Error::Error;
};

struct NonFiniteLoss : Error {
  NonFiniteLoss(const std::string& msg, std::int64_t iter)
      : Error(msg), iteration(iter) {}
  std::int64_t iteration;
};

struct MissingFile : Error {
  using Error::Error;
};

struct MalformedLine : Error {
  MalformedLine(const std::string& msg, std::int64_t line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
  std::int64_t line_number;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct InsufficientPoints : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace lwsgcn
