#pragma once

#include <ergodiff/numeric.hpp>
#include <ergodiff/real.hpp>
#include <ergodiff/sequences.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ergodiff
{

struct checkpoint_magnitude {
    std::uint64_t m;
    double magnitude;
};

// |(1/N) sum_n e(lambda a_n)| together with its running values at the
// geometric checkpoints M = 1, 2, 4, ... and M = N.
struct weyl_sum_report {
    std::string lambda;
    std::uint64_t n = 0;
    double magnitude = 0.0;
    std::vector<checkpoint_magnitude> trajectory;
};

struct residue_histogram {
    std::uint64_t modulus = 1;
    std::vector<std::uint64_t> counts;
    std::uint64_t n = 0;
    double max_deviation = 0.0;
};

enum class verdict { consistent, violated, indeterminate };

std::string to_string(verdict v);

struct lambda_probe {
    std::string lambda;
    double magnitude;
    std::vector<checkpoint_magnitude> trajectory;
};

struct residue_probe {
    std::uint64_t m;
    double deviation;
    // max over 0 < j < m of |S_M(j/m)| at each checkpoint.
    std::vector<checkpoint_magnitude> trajectory;
};

struct norm_ergodic_verdict {
    std::vector<lambda_probe> irrational_probes;
    std::vector<residue_probe> residue_probes;
    verdict result = verdict::indeterminate;
    std::string reason;
};

struct probe_thresholds {
    // |S_M| above this at the last three checkpoints falsifies.
    double falsification = 0.5;
    std::size_t sustained_checkpoints = 3;
};

// Checkpoints 1, 2, 4, ... below n, then n itself.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n);

weyl_sum_report weyl_sum(std::span<const std::int64_t> values, const real_constant &lambda);

residue_histogram residue_distribution(std::span<const std::int64_t> values, std::uint64_t m);

// |(1/N) sum_j counts[j] e(j k / m)|, the Weyl sum at lambda = k/m recovered
// from the residue histogram alone.
double weyl_from_histogram(const residue_histogram &h, std::uint64_t k);

// Exact D*_N of points in [0, 1).
double star_discrepancy(std::vector<double> points);

std::vector<real_constant> default_lambda_probes();

norm_ergodic_verdict norm_ergodic_probe(const sequence_spec &spec, std::uint64_t n,
                                        const std::vector<real_constant> &lambdas,
                                        const std::vector<std::uint64_t> &moduli,
                                        const probe_thresholds &thresholds = {},
                                        const precision_policy &policy = {});

struct polynomial_probe {
    // Coefficients in ascending degree.
    std::vector<rational> coeffs;
    std::vector<double> grid;
    std::vector<double> ratios;
    bool diverges = false;
};

struct boshernitzan_report {
    std::uint64_t degree_bound = 0;
    std::uint64_t height_bound = 0;
    std::vector<polynomial_probe> probes;
    bool all_diverge = false;
    // Finite enumeration of an infinite condition.
    bool heuristic = true;
};

std::vector<double> geometric_grid(double x_min, double x_max, std::size_t points);

// Distinct rationals a/b with |a| <= height and 1 <= b <= height, ascending.
std::vector<rational> height_box(std::uint64_t height);

boshernitzan_report boshernitzan_probe(const sequence_spec &spec, std::uint64_t degree_bound,
                                       std::uint64_t height_bound, const std::vector<double> &grid);

} // namespace ergodiff
