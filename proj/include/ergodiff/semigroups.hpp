#pragma once

#include <ergodiff/numeric.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ergodiff
{

// First `prime_universe_size` primes; exponent vectors index into this list.
inline constexpr std::size_t prime_universe_size = 64;
const std::vector<std::uint64_t> &prime_universe();

// (Z, +).
struct int_add {
    bigint k;
    bool operator==(const int_add &) const = default;
    std::weak_ordering operator<=>(const int_add &) const = default;
};

// (N, *) as nonnegative exponent vectors over the prime universe; trailing zeros trimmed.
struct nat_mul {
    std::vector<std::int64_t> exponents;
    bool operator==(const nat_mul &) const = default;
    auto operator<=>(const nat_mul &) const = default;
};

// Positive rationals under multiplication: the group of quotients of (N, *).
struct q_pos {
    std::vector<std::int64_t> exponents;
    bool operator==(const q_pos &) const = default;
    auto operator<=>(const q_pos &) const = default;
};

// Upper unitriangular integer matrix [[1,a,c],[0,1,b],[0,0,1]] written (a, b, c).
struct heisenberg {
    bigint a;
    bigint b;
    bigint c;
    bool operator==(const heisenberg &) const = default;
    std::weak_ordering operator<=>(const heisenberg &) const = default;
};

// Finitely supported permutation of N; only moved points are stored.
struct fin_perm {
    std::map<std::uint64_t, std::uint64_t> moved;
    bool operator==(const fin_perm &) const = default;
    auto operator<=>(const fin_perm &) const = default;
};

// Polynomial over F_q (q prime), ascending coefficients, trailing zeros trimmed.
struct fq_poly {
    std::vector<std::uint32_t> coeffs;
    bool operator==(const fq_poly &) const = default;
    auto operator<=>(const fq_poly &) const = default;

    // Degree, or -1 for the zero polynomial.
    long degree() const noexcept
    {
        return static_cast<long>(coeffs.size()) - 1;
    }
};

// Heisenberg group over F_q[x]: (f, g, h) with the same law as `heisenberg`.
struct poly_heis {
    std::uint32_t q = 2;
    fq_poly f;
    fq_poly g;
    fq_poly h;
    bool operator==(const poly_heis &) const = default;
    auto operator<=>(const poly_heis &) const = default;
};

enum class element_tag { int_add, nat_mul, q_pos, heisenberg, fin_perm, poly_heis };

std::string to_string(element_tag tag);
bool is_group(element_tag tag);

// Element of one of the concrete (semi)groups.
//
// Text forms: "int:5", "natmul:2^3*3*5", "qpos:2^-1*3", "heis:(1,0,2)",
// "perm:(1 2 3)(4 5)", "polyheis:q=2;f=x+1;g=x;h=x^2".
class semigroup_element
{
public:
    using variant_type = std::variant<int_add, nat_mul, q_pos, heisenberg, fin_perm, poly_heis>;

    semigroup_element(variant_type v);

    static semigroup_element parse(std::string_view text);

    element_tag tag() const noexcept
    {
        return static_cast<element_tag>(v_.index());
    }
    const variant_type &variant() const noexcept
    {
        return v_;
    }
    std::string text() const;

    bool operator==(const semigroup_element &) const = default;
    std::weak_ordering operator<=>(const semigroup_element &other) const;

private:
    variant_type v_;
};

// Exponent vector of a natural number over the prime universe. Throws
// prime_universe_overflow if n has a prime factor outside it.
std::vector<std::int64_t> factor_exponents(const bigint &n);
bigint natural_value(const nat_mul &x);
rational rational_value(const q_pos &x);

semigroup_element identity_like(const semigroup_element &x);
bool is_identity(const semigroup_element &x);

semigroup_element mul(const semigroup_element &x, const semigroup_element &y);
// Throws not_a_group for (N, *).
semigroup_element inv(const semigroup_element &x);

// The embedding of (N, *) into its group of quotients.
semigroup_element to_group_of_quotients(const semigroup_element &x);

// A^{-1}B: in groups {a^{-1} b}; in (N, *) the set of h with a h in B.
// Result sorted and deduplicated.
std::vector<semigroup_element> left_quotient_set(std::span<const semigroup_element> a,
                                                 std::span<const semigroup_element> b);

// A^{-1}(B g).
std::vector<semigroup_element> right_translate_quotient(std::span<const semigroup_element> a,
                                                        std::span<const semigroup_element> b,
                                                        const semigroup_element &g);

// Smallest natural g with F g inside N, for F a finite set of positive rationals.
semigroup_element clear_denominators(std::span<const semigroup_element> f);

fq_poly fq_add(const fq_poly &x, const fq_poly &y, std::uint32_t q);
fq_poly fq_neg(const fq_poly &x, std::uint32_t q);
fq_poly fq_mul(const fq_poly &x, const fq_poly &y, std::uint32_t q);

} // namespace ergodiff
