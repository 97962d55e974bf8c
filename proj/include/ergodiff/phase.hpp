#pragma once

#include <ergodiff/numeric.hpp>
#include <ergodiff/real.hpp>

#include <cmath>
#include <cstdint>

namespace ergodiff
{

// A point of R/Z in fixed point with 128 fractional bits:
// value = floor(frac(x) * 2^128). Arithmetic wraps modulo 2^128, which is
// exactly reduction mod 1.
struct phase {
    u128 value = 0;
    // frac(x) * 2^128 is an integer, so value carries no truncation error.
    bool exact = true;
};

phase to_phase(const rational &x);
phase to_phase(const real_constant &x);

// frac(lambda * a) in fixed point. When lambda is not exact the result is
// low by less than |a| units of 2^-128.
inline u128 phase_times(const phase &lambda, std::int64_t a) noexcept
{
    return lambda.value * static_cast<u128>(static_cast<i128>(a));
}

// Worst-case error of phase_times in units of 2^-128.
inline u128 phase_error(const phase &lambda, std::int64_t a) noexcept
{
    if (lambda.exact) {
        return 0;
    }
    return static_cast<u128>(a < 0 ? -static_cast<i128>(a) : static_cast<i128>(a)) + 1;
}

inline double phase_to_double(u128 v) noexcept
{
    return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(v >> 64)), -64)
           + std::ldexp(static_cast<double>(static_cast<std::uint64_t>(v)), -128);
}

} // namespace ergodiff
