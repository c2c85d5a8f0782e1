#pragma once

#include <stdexcept>

namespace lowlight {

/// Violated argument or input contract (bad shape, bad value, missing input).
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem or serialization failure (unreadable, unwritable, corrupt file).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite value where the computation requires a finite one.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lowlight
