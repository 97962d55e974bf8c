#pragma once

#include <ergodiff/numeric.hpp>
#include <ergodiff/real.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ergodiff
{

// g(n) = n^(p/q), p/q reduced.
struct rational_power {
    unsigned long p;
    unsigned long q;
};

// g(n) = n^c for an irrational (or at least non-rational-literal) c > 0.
struct real_power {
    real_constant c;
};

// g(n) = max(1, n log n).
struct n_log_n {
};

// g(n) = max(1, n^2 / log n), with g(1) = 1.
struct n_sq_over_log {
};

// g(n) = max(1, (log n)^t), t > 1.
struct log_power {
    real_constant t;
};

// g(n) = c_0 + c_1 n + ... + c_d n^d (coefficients in ascending degree).
struct real_polynomial {
    std::vector<real_constant> coeffs;
};

// g(n) = a n + b sqrt(n).
struct affine_sqrt {
    unsigned long a;
    unsigned long b;
};

using sequence_variant
    = std::variant<rational_power, real_power, n_log_n, n_sq_over_log, log_power, real_polynomial, affine_sqrt>;

// Symbolic description of g : N -> [1, inf). Construction validates g >= 1.
//
// Text grammar: "pow:3/2", "rpow:sqrt2", "nlogn", "nsqoverlog", "logpow:2",
// "poly:c0,c1,...,cd", "affsqrt:a,b".
class sequence_spec
{
public:
    explicit sequence_spec(sequence_variant v);

    static sequence_spec parse(std::string_view text);

    const sequence_variant &variant() const noexcept
    {
        return v_;
    }
    std::string text() const;

    // RationalPower and AffineSqrt are evaluated by integer arithmetic only.
    bool has_exact_path() const noexcept;
    bool monotone() const noexcept;

    // Certified enclosure of g at a real point x >= 1.
    real_interval eval(const real_interval &x, mpfr_prec_t prec) const;

private:
    sequence_variant v_;
};

struct precision_policy {
    mpfr_prec_t start_bits = 64;
    mpfr_prec_t cap_bits = 4096;
    // Certified results enclose the fractional part in an interval no wider than this.
    rational tolerance = rational(1, bigint(1) << 32);
};

struct rational_interval {
    rational lo;
    rational hi;

    bool is_point() const
    {
        return lo == hi;
    }
    bool contains(const rational &x) const
    {
        return lo <= x && x <= hi;
    }
};

struct floor_result {
    bigint value;
    bool certified = false;
    // Encloses {g(n)} when certified; the hull [0, 1] otherwise.
    rational_interval frac;
    // Enclosure of g(n) itself.
    rational_interval g;
    mpfr_prec_t bits_used = 0;
};

floor_result floor_eval(const sequence_spec &spec, std::uint64_t n, const precision_policy &policy = {});

// [g(n)], throwing precision_exhausted when the floor is not certified.
bigint floor_value(const sequence_spec &spec, std::uint64_t n, const precision_policy &policy = {});

// [g(1)], ..., [g(count)] as 64-bit integers. Throws precision_exhausted or
// std::overflow_error.
std::vector<std::int64_t> floor_values(const sequence_spec &spec, std::uint64_t count,
                                       const precision_policy &policy = {});

// Certified enclosure of {scale * g(n)}.
rational_interval frac_eval(const sequence_spec &spec, std::uint64_t n, const rational &scale,
                            const precision_policy &policy = {});

} // namespace ergodiff
