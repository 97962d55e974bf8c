#pragma once

#include <ergodiff/numeric.hpp>

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <mpfr.h>

namespace ergodiff
{

// RAII holder for an mpfr_t.
class mpfr_number
{
public:
    explicit mpfr_number(mpfr_prec_t prec);
    mpfr_number(const mpfr_number &other);
    mpfr_number(mpfr_number &&other) noexcept;
    mpfr_number &operator=(const mpfr_number &other);
    mpfr_number &operator=(mpfr_number &&other) noexcept;
    ~mpfr_number();

    mpfr_ptr get() noexcept
    {
        return value_;
    }
    mpfr_srcptr get() const noexcept
    {
        return value_;
    }
    mpfr_prec_t precision() const noexcept
    {
        return mpfr_get_prec(value_);
    }

    rational to_rational() const;
    double to_double() const;

private:
    mpfr_t value_;
};

// Closed interval [lo, hi] with endpoints rounded outward. Every operation
// below returns an enclosure of the exact result set.
struct real_interval {
    mpfr_number lo;
    mpfr_number hi;

    explicit real_interval(mpfr_prec_t prec) : lo(prec), hi(prec) {}

    static real_interval point(const rational &q, mpfr_prec_t prec);
    static real_interval point(const bigint &z, mpfr_prec_t prec);
    static real_interval point(long value, mpfr_prec_t prec);

    mpfr_prec_t precision() const noexcept
    {
        return lo.precision();
    }
    bool is_point() const;
    bool certainly_positive() const;
    bool certainly_negative() const;
    // floor(lo) == floor(hi) and the interval does not reach past an integer from below.
    bool floor_is_determined() const;
    bigint floor_lo() const;
    bigint floor_hi() const;
    rational lo_rational() const
    {
        return lo.to_rational();
    }
    rational hi_rational() const
    {
        return hi.to_rational();
    }
    double midpoint() const;
    double width() const;
};

real_interval operator+(const real_interval &a, const real_interval &b);
real_interval operator-(const real_interval &a, const real_interval &b);
real_interval operator-(const real_interval &a);
real_interval operator*(const real_interval &a, const real_interval &b);
real_interval operator/(const real_interval &a, const real_interval &b);

real_interval sqrt(const real_interval &a);
real_interval log(const real_interval &a);
real_interval exp(const real_interval &a);
// a^b for a certainly positive.
real_interval pow(const real_interval &a, const real_interval &b);
real_interval pow(const real_interval &a, long exponent);
real_interval max_with(const real_interval &a, long floor_value);

real_interval pi_interval(mpfr_prec_t prec);

// A real constant written as an arithmetic expression, e.g. "sqrt2-1",
// "(sqrt(5)-1)/2", "pi-3", "0.3" or "3/2". Evaluation at any precision
// returns a certified enclosure; purely rational expressions are also kept
// as an exact rational.
class real_constant
{
public:
    real_constant();
    static real_constant parse(std::string_view text);
    static real_constant from_rational(const rational &q);

    real_interval eval(mpfr_prec_t prec) const;
    const std::optional<rational> &exact() const noexcept
    {
        return exact_;
    }
    const std::string &text() const noexcept
    {
        return text_;
    }
    double approx() const;

    struct node;

private:
    std::shared_ptr<const node> root_;
    std::string text_;
    std::optional<rational> exact_;
};

} // namespace ergodiff
