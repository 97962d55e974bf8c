#include <ergodiff/numeric.hpp>

#include <ergodiff/errors.hpp>

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ergodiff
{

bigint integer_root(const bigint &x, unsigned long q)
{
    if (q == 0) {
        throw std::invalid_argument("integer_root: q must be at least 1");
    }
    if (sgn(x) < 0) {
        throw std::invalid_argument("integer_root: x must be nonnegative");
    }
    bigint r;
    mpz_root(r.get_mpz_t(), x.get_mpz_t(), q);
    return r;
}

std::uint64_t isqrt(u128 x)
{
    if (x == 0) {
        return 0;
    }
    const long double est = std::sqrt(static_cast<long double>(x));
    // est can round up to 2^64 near the top of the range
    auto r = est >= 0x1p64L ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(est);
    // The long double estimate is within a few units; correct it exactly.
    while (r > 0 && static_cast<u128>(r) * r > x) {
        --r;
    }
    while (r < std::numeric_limits<std::uint64_t>::max()) {
        const u128 next = static_cast<u128>(r) + 1;
        if (next * next > x) {
            break;
        }
        ++r;
    }
    return r;
}

bigint ipow(const bigint &base, unsigned long exponent)
{
    bigint r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
    return r;
}

bool fits_int64(const bigint &x)
{
    static const bigint lo = bigint(std::to_string(std::numeric_limits<std::int64_t>::min()));
    static const bigint hi = bigint(std::to_string(std::numeric_limits<std::int64_t>::max()));
    return x >= lo && x <= hi;
}

std::int64_t to_int64(const bigint &x)
{
    if (!fits_int64(x)) {
        throw std::overflow_error("integer " + x.get_str() + " does not fit in 64 bits");
    }
    return std::stoll(x.get_str());
}

bigint from_u128(u128 x)
{
    bigint hi(static_cast<unsigned long>(static_cast<std::uint64_t>(x >> 64)));
    bigint lo(static_cast<unsigned long>(static_cast<std::uint64_t>(x)));
    return (hi << 64) + lo;
}

u128 to_u128(const bigint &x)
{
    if (sgn(x) < 0 || mpz_sizeinbase(x.get_mpz_t(), 2) > 128) {
        throw std::overflow_error("integer " + x.get_str() + " does not fit in 128 bits");
    }
    bigint hi = x >> 64;
    bigint lo = x - (hi << 64);
    return (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
}

double to_double(const rational &q)
{
    // Round to nearest; mpq_get_d truncates.
    mpfr_t x;
    mpfr_init2(x, 53);
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    const double d = mpfr_get_d(x, MPFR_RNDN);
    mpfr_clear(x);
    return d;
}

std::string to_string(const bigint &x)
{
    return x.get_str();
}

std::string to_string(const rational &q)
{
    return q.get_str();
}

rational parse_rational(const std::string &text)
{
    if (text.empty()) {
        throw parse_error("empty rational literal");
    }
    std::string s = text;
    bool negative = false;
    if (s[0] == '-' || s[0] == '+') {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    rational value;
    const auto slash = s.find('/');
    const auto dot = s.find('.');
    auto digits_only = [](const std::string &d) {
        if (d.empty()) {
            return false;
        }
        for (char c : d) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                return false;
            }
        }
        return true;
    };
    if (slash != std::string::npos) {
        const auto num = s.substr(0, slash);
        const auto den = s.substr(slash + 1);
        if (!digits_only(num) || !digits_only(den)) {
            throw parse_error("malformed rational '" + text + "'");
        }
        bigint d(den);
        if (d == 0) {
            throw parse_error("zero denominator in '" + text + "'");
        }
        value = rational(bigint(num), d);
    } else if (dot != std::string::npos) {
        auto whole = s.substr(0, dot);
        const auto frac = s.substr(dot + 1);
        if (whole.empty()) {
            whole = "0";
        }
        if (!digits_only(whole) || (!frac.empty() && !digits_only(frac))) {
            throw parse_error("malformed decimal '" + text + "'");
        }
        bigint scale = ipow(10, frac.size());
        value = rational(bigint(whole) * scale + (frac.empty() ? bigint(0) : bigint(frac)), scale);
    } else {
        if (!digits_only(s)) {
            throw parse_error("malformed integer '" + text + "'");
        }
        value = rational(bigint(s));
    }
    value.canonicalize();
    return negative ? rational(-value) : value;
}

bigint floor(const rational &q)
{
    bigint r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

bigint mod_floor(const bigint &a, const bigint &m)
{
    bigint r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

} // namespace ergodiff
