#pragma once

#include <stdexcept>
#include <string>

namespace msseg {

// Thrown for malformed parameters and config files (CLI exit code 2).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown for unreadable/unwritable rasters and other file problems (CLI exit code 3).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a numeric procedure cannot proceed, e.g. a mixture component
// collapses or a calibration window never reaches its plateau (CLI exit code 4).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace msseg
