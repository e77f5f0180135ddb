#pragma once

#include <stdexcept>
#include <string>

namespace netsirs {

/// Domain error: invalid input, violated precondition, exhausted budget.
/// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace netsirs
