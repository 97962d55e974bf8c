#pragma once

#include <ergodiff/numeric.hpp>
#include <ergodiff/phase.hpp>
#include <ergodiff/real.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ergodiff
{

// x -> x + alpha on R/Z.
struct circle_system {
    real_constant alpha;
};

// x -> x + 1 on Z/mZ.
struct cyclic_system {
    std::uint64_t m = 1;
};

class rotation_system;

struct product_system {
    std::vector<rotation_system> factors;
};

// Grammar: "circle:alpha=sqrt2-1", "cyclic:m=4",
// "product:circle:alpha=sqrt2-1|cyclic:m=3".
class rotation_system
{
public:
    using variant_type = std::variant<circle_system, cyclic_system, product_system>;

    explicit rotation_system(variant_type v);
    static rotation_system parse(std::string_view text);

    const variant_type &variant() const noexcept
    {
        return v_;
    }
    std::string text() const;
    // Number of factors (1 unless a product).
    std::size_t arity() const;

private:
    variant_type v_;
};

// Half-open arc [start, start + length) on R/Z.
struct arc {
    rational start;
    rational length;
};

// Indicator of a subset of one factor: arcs on a circle or residues mod m.
struct factor_observable {
    std::vector<arc> arcs;
    std::vector<std::uint64_t> residues;
    bool is_arcs = true;
};

// Grammar per factor: "arc:0,0.5", "arcs:0,0.25;0.5,0.25", "res:0,2";
// factors of a product joined with '|'.
struct observable {
    std::vector<factor_observable> factors;

    static observable parse(std::string_view text);
    std::string text() const;
    // Exact total measure of each factor's set.
    std::vector<rational> measures(const rotation_system &system) const;
};

// Starting point; one coordinate per factor (rational on circles, residues on cyclic).
struct start_point {
    std::vector<rational> coords;

    static start_point parse(std::string_view text);
    static start_point origin(const rotation_system &system);
};

struct orbit_average_report {
    std::uint64_t n = 0;
    std::uint64_t hits = 0;
    // Orbit points whose membership could not be separated from an arc endpoint.
    std::uint64_t boundary_failures = 0;
    double average = 0;
};

// (1/N) Σ 1_obs(T^{a_n} x0). Ambiguous points are counted, not guessed.
orbit_average_report orbit_average_report_of(const rotation_system &system, const start_point &x0,
                                             const observable &obs, std::span<const std::int64_t> values);
// Same, throwing boundary_ambiguous on the first ambiguous point.
double orbit_average(const rotation_system &system, const start_point &x0, const observable &obs,
                     std::span<const std::int64_t> values);

// μ(A ∩ (A + θ)) for A = [0, β): max(0, β - θ) + max(0, θ + β - 1), θ in [0, 1).
rational arc_overlap(const rational &beta, const rational &theta);
// The same in 128-bit fixed point; beta_phase = floor(β 2^128), β < 1.
u128 arc_overlap_phase(u128 beta_phase, u128 theta_phase) noexcept;

struct recurrence_report {
    std::uint64_t n = 0;
    double average = 0;
    double min_term = 0;
    double max_term = 0;
    // Every term exact (rational alpha); otherwise each term carries
    // the 2^-128 |a_n| error of the fixed-point angle.
    bool exact = false;
};

// (1/N) Σ μ(A ∩ T^{a_n} A) on a circle with A = [0, β), 0 < β <= 1.
recurrence_report recurrence_average(const circle_system &circle, const rational &beta,
                                     std::span<const std::int64_t> values);

// μ(A ∩ (A + θ)) for a finite union of arcs, computed in double.
double arcs_overlap(const std::vector<arc> &arcs, double theta);

// (1/N) Σ Π_i μ_i(A_i ∩ T_i^{a_n} A_i) over the factors of a product (or a single system).
double product_recurrence(const rotation_system &system, const observable &obs,
                          std::span<const std::int64_t> values);

} // namespace ergodiff
