#pragma once

#include <ergodiff/bitset.hpp>
#include <ergodiff/folner.hpp>
#include <ergodiff/numeric.hpp>
#include <ergodiff/sequences.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ergodiff
{

enum class set_domain { naturals, integers };

std::string to_string(set_domain d);

// Finite truncation of a subset of N (window [1, N]) or Z (window [-N, N]).
class windowed_set
{
public:
    windowed_set(set_domain domain, std::uint64_t horizon);
    windowed_set(set_domain domain, std::uint64_t horizon, bitvec bits);

    static windowed_set from_predicate(set_domain domain, std::uint64_t horizon,
                                       const std::function<bool(std::int64_t)> &member);
    static windowed_set from_members(set_domain domain, std::uint64_t horizon, std::span<const std::int64_t> members);

    set_domain domain() const noexcept
    {
        return domain_;
    }
    std::uint64_t horizon() const noexcept
    {
        return horizon_;
    }
    std::int64_t min_value() const noexcept
    {
        return domain_ == set_domain::naturals ? 1 : -static_cast<std::int64_t>(horizon_);
    }
    std::int64_t max_value() const noexcept
    {
        return static_cast<std::int64_t>(horizon_);
    }
    bool in_window(std::int64_t x) const noexcept
    {
        return x >= min_value() && x <= max_value();
    }
    // False outside the window.
    bool contains(std::int64_t x) const noexcept
    {
        return in_window(x) && bits_.test(index(x));
    }
    std::size_t index(std::int64_t x) const noexcept
    {
        return static_cast<std::size_t>(x - min_value());
    }
    std::int64_t value(std::size_t index) const noexcept
    {
        return static_cast<std::int64_t>(index) + min_value();
    }

    const bitvec &bits() const noexcept
    {
        return bits_;
    }
    std::uint64_t count() const noexcept
    {
        return bits_.count();
    }
    std::vector<std::int64_t> members() const;
    windowed_set complement() const;

    bool operator==(const windowed_set &) const = default;

private:
    set_domain domain_;
    std::uint64_t horizon_;
    bitvec bits_;
};

// Set grammar for the CLI and tests:
//   all | squares | mult:k | list:1,2,4 | floor-even:<sequence> | example-3-13
windowed_set build_set(std::string_view spec, set_domain domain, std::uint64_t horizon);

struct density_estimate {
    std::uint64_t n_max = 0;
    // |S ∩ F_n| / |F_n| for n = 1..n_max.
    std::vector<rational> ratios;
    // Indices tail_start..n_max form the tail (last 20%).
    std::uint64_t tail_start = 0;
    rational tail_max;
    rational tail_min;
};

// Exact ratios along an interval family. Throws family_exceeds_window if some
// F_n leaves the window, tag_mismatch for non-interval families.
density_estimate windowed_density(const windowed_set &s, const folner_family &family, std::uint64_t n_max);

// Δ1(S) = {a - b : a, b in S} over Z with window [-W, W], W the window span.
windowed_set delta1(const windowed_set &s);
// Quadratic pairs scan; reference for delta1.
windowed_set delta1_bruteforce(const windowed_set &s);

struct delta2_options {
    const folner_family *family = nullptr; // defaults to {1..n}
    std::uint64_t family_n_max = 0;        // defaults to the horizon
    std::uint64_t n_max = 0;               // shifts g(1..n_max); defaults to the horizon
    double theta = 1e-3;
    precision_policy precision;
};

// n in result iff the tail max of d(S ∩ (S - [g(n)])) along F is at least theta.
windowed_set delta2_g(const windowed_set &s, const sequence_spec &g, const delta2_options &options = {});

// |S ∩ (S - n)| inside the window.
std::uint64_t delta3_count(const windowed_set &s, std::int64_t n);

struct gap_run_stats {
    std::uint64_t max_gap = 0;
    std::uint64_t max_run = 0;
    // gap length (difference of consecutive members) -> occurrences.
    std::map<std::uint64_t, std::uint64_t> gap_histogram;
    // gap length -> first member a whose successor is a + length.
    std::map<std::uint64_t, std::int64_t> first_gap_of_length;
};

gap_run_stats gap_run_stats_of(const windowed_set &s);

// D_g for g(n) = 2n + 2 sqrt(n): (2n + isqrt(4n)) mod 4 == 0.
bool member_3_13(std::uint64_t n);
// D_{3/2}: isqrt(n^3) even.
bool member_3_14(std::uint64_t n);
// The same predicates through GMP.
bool member_3_13_mpz(std::uint64_t n);
bool member_3_14_mpz(std::uint64_t n);

struct example_3_13_report {
    std::uint64_t horizon = 0;
    std::uint64_t members = 0;
    // n with n and n + 1 both members, n + 1 <= horizon.
    std::vector<std::uint64_t> violations;
};

example_3_13_report verify_example_3_13(std::uint64_t horizon);

struct gap_search_result {
    std::uint64_t run_length = 0;
    std::uint64_t bound = 0;
    std::optional<std::uint64_t> m;
    // Recomputed with GMP.
    bool verified = false;
};

// Least M <= bound with M, ..., M + R all outside D_{3/2}. R = 0 gives the first non-member.
gap_search_result find_gap_3_14(std::uint64_t run_length, std::uint64_t bound);

struct cover_certificate {
    std::vector<std::int64_t> translates;
    std::int64_t target_lo = 0;
    std::int64_t target_hi = 0;
    std::uint64_t ell = 0;
    std::uint64_t greedy_ell = 0;
    // No smaller cover exists among the candidate translates.
    bool minimal = false;
    bool verified = false;
};

struct cover_options {
    std::uint64_t ell_max = 16;
    std::uint64_t node_budget = 10'000'000;
};

// Translates m with [-M, M] ⊆ ∪ (E + m), |m| <= W - M. nullopt if no cover of size <= ell_max.
std::optional<cover_certificate> cover_search(const windowed_set &e, std::uint64_t target_m,
                                              const cover_options &options = {});
// Every point of the target lies in some E + m_i.
bool verify_cover(const windowed_set &e, const cover_certificate &cert);

// Density of S ∩ ⋂_j (S - s_j) along the family.
density_estimate intersection_density(const windowed_set &s, std::span<const std::int64_t> shifts,
                                      const folner_family &family, std::uint64_t n_max);

// {"domain":"N","horizon":N,"runs":[[a,b],...]} with inclusive runs.
std::string to_rle_json(const windowed_set &s);
windowed_set from_rle_json(std::string_view text);
// One member per line.
std::string to_lines(const windowed_set &s);
windowed_set from_lines(std::string_view text, set_domain domain, std::uint64_t horizon);

} // namespace ergodiff
