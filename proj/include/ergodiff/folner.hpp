#pragma once

#include <ergodiff/int_expr.hpp>
#include <ergodiff/numeric.hpp>
#include <ergodiff/semigroups.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ergodiff
{

inline constexpr std::uint64_t default_enumeration_cap = 100'000'000;

// F_n = {a_n, ..., b_n} in (N, +).
struct interval_family {
    int_expr a = int_expr::parse("1");
    int_expr b = int_expr::parse("n");
};

// F_n = {p_1^{c_1} ... p_n^{c_n} : 0 <= c_i <= bound_i(n)} in (N, *).
//   paper: bound_i(n) = (i+1)^{2n}
//   f:     bound_i(n) = f(n)
//   eps:   bound_i(n) = floor((i+1)^{(1+eps) n}), eps >= 0 rational
struct multbox_family {
    enum class kind { paper, f, eps } k = kind::paper;
    std::optional<int_expr> f;
    rational eps = 1;
};

// F_n = {(a, b, c) : |a|, |b| <= p(n), |c| <= q(n)} in the integer Heisenberg group.
struct heisbox_family {
    int_expr p = int_expr::parse("n");
    int_expr q = int_expr::parse("n^2");
};

// Increasing chain of finite subgroups: S_n inside the finitary permutations,
// or the degree boxes deg f, deg g <= n, deg h <= 2n in the Heisenberg group over F_q[x].
struct chain_family {
    enum class kind { sym, polyheis } k = kind::sym;
    std::uint32_t q = 2;
};

using family_variant = std::variant<interval_family, multbox_family, heisbox_family, chain_family>;

// Grammar: "interval:a=n^2,b=n^2+n", "multbox:paper", "multbox:f=n^n",
// "multbox:eps=1/2", "heisbox", "heisbox:p=n,q=n^2", "chain:sym",
// "chain:polyheis:q=2".
class folner_family
{
public:
    explicit folner_family(family_variant v);
    static folner_family parse(std::string_view text);

    const family_variant &variant() const noexcept
    {
        return v_;
    }
    std::string text() const;
    element_tag tag() const;

    // Closed-form |F_n|.
    bigint cardinality(std::uint64_t n) const;
    // Whether F_1 ⊆ ... ⊆ F_n, decided from the parameters.
    bool nested_through(std::uint64_t n) const;

    // Exponent bound of prime i (1-based) in F_n for multiplicative boxes; 0 past n.
    bigint box_bound(std::uint64_t i, std::uint64_t n) const;
    // [a_n, b_n] for interval families.
    std::pair<bigint, bigint> interval_bounds(std::uint64_t n) const;
    // (p(n), q(n)) for Heisenberg boxes.
    std::pair<bigint, bigint> heis_bounds(std::uint64_t n) const;

    // Sorted element list of F_n, memoized. Throws enumeration_too_large
    // when |F_n| exceeds the cap.
    std::shared_ptr<const std::vector<semigroup_element>> elements(std::uint64_t n,
                                                                   std::uint64_t cap = default_enumeration_cap) const;

private:
    struct cache;

    family_variant v_;
    std::shared_ptr<cache> cache_;
};

// |F_n ∩ g F_n| / |F_n|.
rational folner_defect(const folner_family &family, const semigroup_element &g, std::uint64_t n,
                       std::uint64_t cap = default_enumeration_cap);
// Same quantity by direct enumeration of F_n; used as a cross-check.
rational folner_defect_enumerated(const folner_family &family, const semigroup_element &g, std::uint64_t n,
                                  std::uint64_t cap = default_enumeration_cap);

enum class quotient_mode { group, semigroup };
enum class ratio_method { automatic, closed_form, enumeration };

std::string to_string(quotient_mode m);
std::string to_string(ratio_method m);

struct ratio_options {
    quotient_mode mode = quotient_mode::group;
    // Right translate for the semigroup form F_k^{-1}(F_n g); identity if empty.
    std::optional<semigroup_element> g;
    ratio_method method = ratio_method::automatic;
    std::uint64_t cap = default_enumeration_cap;
};

struct ratio_result {
    std::uint64_t n = 0;
    bigint quotient_size;
    bigint family_size;
    rational ratio;
    ratio_method method = ratio_method::closed_form;
    // Whether the union over k < n was reduced to k = n - 1.
    bool nested = false;
    // Known upper bound on this ratio, if the family has one.
    std::optional<rational> bound;
};

// |∪_{k<n} F_k^{-1} F_n| / |F_n| (or with F_n g in semigroup mode). n >= 2.
ratio_result tempered_ratio(const folner_family &family, std::uint64_t n, const ratio_options &options = {});

struct temperedness_report {
    std::string family;
    quotient_mode mode = quotient_mode::group;
    std::vector<std::string> g_set;
    std::uint64_t n_max = 0;
    rational c_candidate;
    std::vector<ratio_result> ratios;
    rational sup;
    std::uint64_t sup_index = 0;
    // Limit bound known for the whole family, when one exists.
    std::optional<double> closed_form_bound;
    std::optional<std::uint64_t> first_violation;
};

// Ratios for 2 <= n <= n_max. In semigroup mode each ratio is the max over g_set.
temperedness_report temperedness_scan(const folner_family &family, std::uint64_t n_max, const rational &c_candidate,
                                      const ratio_options &options = {},
                                      const std::vector<semigroup_element> &g_set = {});

struct criterion_report {
    std::string f;
    std::uint64_t n_max = 0;
    // n f(n) / f(n+1) for n = 1..n_max.
    std::vector<rational> values;
    // (1 + f(n-1)/(f(n)+1))^{n-1} for n = 2..n_max.
    std::vector<rational> box_ratios;
    rational max_value;
    std::uint64_t max_index = 0;
    // "growing" when the tail increases to the maximum at n_max and has at least
    // doubled since mid-range; otherwise "bounded". A finite-range label only.
    std::string trend;
    // e^{C+1} with C the observed maximum.
    double exp_bound = 0;
};

// Throws not_nondecreasing if f decreases on [1, n_max + 1] and
// std::invalid_argument if f is constant on the upper half of that range.
criterion_report criterion_5_3(const int_expr &f, std::uint64_t n_max);

struct heis_count_report {
    std::uint64_t n = 0;
    bigint count;
    bigint family_size;
    bigint bound;
    std::uint64_t pairs = 0;
};

// Exact |F_{n-1}^{-1} F_n| for the default Heisenberg box, with the
// cardinality and the product bound (2(2n-1)+1)^2 (4(n-1)^2 + 2n(n-1) + 2n^2 + 1).
heis_count_report heisenberg_quotient_count(std::uint64_t n, std::uint64_t cap = default_enumeration_cap);

// The upper bound above, as a function of n.
bigint heisenberg_quotient_bound(std::uint64_t n);

} // namespace ergodiff
