#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace ergodiff
{

using bigint = mpz_class;
using rational = mpq_class;
using u128 = unsigned __int128;
using i128 = __int128;

// Largest r with r^q <= x.
bigint integer_root(const bigint &x, unsigned long q);

// Fast floor square root for values that fit in 128 bits.
std::uint64_t isqrt(u128 x);

bigint ipow(const bigint &base, unsigned long exponent);

bool fits_int64(const bigint &x);
// Throws std::overflow_error when x does not fit.
std::int64_t to_int64(const bigint &x);

bigint from_u128(u128 x);
u128 to_u128(const bigint &x);

double to_double(const rational &q);
std::string to_string(const bigint &x);
std::string to_string(const rational &q);

// Parses "a", "-a", "a/b" or a finite decimal such as "0.125" into an exact rational.
rational parse_rational(const std::string &text);

// floor and non-negative residue for rationals.
bigint floor(const rational &q);
bigint mod_floor(const bigint &a, const bigint &m);

} // namespace ergodiff
