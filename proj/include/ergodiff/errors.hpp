#pragma once

#include <stdexcept>
#include <string>

namespace ergodiff
{

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A fractional part could not be separated from an integer boundary
// within the precision cap.
struct precision_exhausted : error {
    using error::error;
};

struct parse_error : error {
    using error::error;
};

struct enumeration_too_large : error {
    using error::error;
};

struct tag_mismatch : error {
    using error::error;
};

struct not_a_group : error {
    using error::error;
};

struct prime_universe_overflow : error {
    using error::error;
};

struct family_exceeds_window : error {
    using error::error;
};

struct boundary_ambiguous : error {
    using error::error;
};

struct not_nondecreasing : error {
    using error::error;
};

} // namespace ergodiff
