#pragma once

#include <stdexcept>
#include <string>

namespace sbam {

/// Malformed or inconsistent user input (files, arguments, configs).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace sbam
