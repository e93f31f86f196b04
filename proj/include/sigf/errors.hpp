#pragma once

#include <stdexcept>
#include <string>

namespace sigf {

// Error taxonomy mirrors the CLI exit codes: usage/config -> 2,
// data/format -> 3, numerical failure -> 4.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sigf
