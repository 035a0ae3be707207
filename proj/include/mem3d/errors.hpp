#pragma once

#include <stdexcept>
#include <string>

namespace mem3d {

// Error taxonomy mirrors the CLI exit codes:
//   1 usage, 2 bad input data, 3 numerical failure.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 1;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 2;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 3;
};

} // namespace mem3d
