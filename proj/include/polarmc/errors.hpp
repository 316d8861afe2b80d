#pragma once

#include <stdexcept>
#include <string>

namespace polarmc {

// Bad file contents, inconsistent schedules, unknown enum values.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / stream failures.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// A pipeline schedule cannot satisfy the clock budget.
struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polarmc
