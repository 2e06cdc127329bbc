#pragma once

#include <stdexcept>
#include <string>

namespace bart {

// Problems with user-supplied data or analysis preconditions.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Problems with stored models: bad archives, version mismatches,
// schema mismatches between a model and the data offered to it.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariants; indicates a bug, not a usage error.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace bart
