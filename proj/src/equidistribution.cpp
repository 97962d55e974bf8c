#include <ergodiff/equidistribution.hpp>

#include <ergodiff/errors.hpp>
#include <ergodiff/phase.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace ergodiff
{

std::string to_string(verdict v)
{
    switch (v) {
    case verdict::consistent:
        return "consistent";
    case verdict::violated:
        return "violated";
    case verdict::indeterminate:
        return "indeterminate";
    }
    return "indeterminate";
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t m = 1; m < n; m *= 2) {
        out.push_back(m);
    }
    if (n >= 1) {
        out.push_back(n);
    }
    return out;
}

weyl_sum_report weyl_sum(std::span<const std::int64_t> values, const real_constant &lambda)
{
    if (values.empty()) {
        throw std::invalid_argument("weyl_sum: need at least one value");
    }
    const auto lam = to_phase(lambda);
    const auto checkpoints = geometric_checkpoints(values.size());
    weyl_sum_report report;
    report.lambda = lambda.text();
    report.n = values.size();
    double re = 0.0;
    double im = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double angle = 2.0 * std::numbers::pi * phase_to_double(phase_times(lam, values[i]));
        re += std::cos(angle);
        im += std::sin(angle);
        const std::uint64_t m = i + 1;
        if (next < checkpoints.size() && checkpoints[next] == m) {
            report.trajectory.push_back({m, std::min(1.0, std::hypot(re, im) / static_cast<double>(m))});
            ++next;
        }
    }
    report.magnitude = report.trajectory.back().magnitude;
    return report;
}

residue_histogram residue_distribution(std::span<const std::int64_t> values, std::uint64_t m)
{
    if (m < 1) {
        throw std::invalid_argument("residue_distribution: modulus must be at least 1");
    }
    residue_histogram h;
    h.modulus = m;
    h.counts.assign(m, 0);
    h.n = values.size();
    const auto mm = static_cast<std::int64_t>(m);
    for (auto a : values) {
        auto r = a % mm;
        if (r < 0) {
            r += mm;
        }
        ++h.counts[static_cast<std::size_t>(r)];
    }
    if (h.n > 0) {
        for (auto c : h.counts) {
            const double dev = std::abs(static_cast<double>(c) / static_cast<double>(h.n) - 1.0 / static_cast<double>(m));
            h.max_deviation = std::max(h.max_deviation, dev);
        }
    }
    return h;
}

double weyl_from_histogram(const residue_histogram &h, std::uint64_t k)
{
    if (h.n == 0) {
        return 0.0;
    }
    double re = 0.0;
    double im = 0.0;
    for (std::uint64_t j = 0; j < h.modulus; ++j) {
        const auto r = static_cast<std::uint64_t>((static_cast<u128>(j) * k) % h.modulus);
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(h.modulus);
        re += static_cast<double>(h.counts[j]) * std::cos(angle);
        im += static_cast<double>(h.counts[j]) * std::sin(angle);
    }
    return std::min(1.0, std::hypot(re, im) / static_cast<double>(h.n));
}

double star_discrepancy(std::vector<double> points)
{
    if (points.empty()) {
        throw std::invalid_argument("star_discrepancy: need at least one point");
    }
    std::sort(points.begin(), points.end());
    const double n = static_cast<double>(points.size());
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double above = static_cast<double>(i + 1) / n - points[i];
        const double below = points[i] - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    return d;
}

std::vector<real_constant> default_lambda_probes()
{
    return {real_constant::parse("sqrt2-1"), real_constant::parse("(sqrt5-1)/2"), real_constant::parse("pi-3")};
}

namespace
{

bool sustained_above(const std::vector<checkpoint_magnitude> &trajectory, const probe_thresholds &t)
{
    if (trajectory.size() < t.sustained_checkpoints) {
        return false;
    }
    return std::all_of(trajectory.end() - static_cast<std::ptrdiff_t>(t.sustained_checkpoints), trajectory.end(),
                       [&](const checkpoint_magnitude &c) { return c.magnitude > t.falsification; });
}

} // namespace

norm_ergodic_verdict norm_ergodic_probe(const sequence_spec &spec, std::uint64_t n,
                                        const std::vector<real_constant> &lambdas,
                                        const std::vector<std::uint64_t> &moduli, const probe_thresholds &thresholds,
                                        const precision_policy &policy)
{
    norm_ergodic_verdict out;
    std::vector<std::int64_t> values;
    try {
        values = floor_values(spec, n, policy);
    } catch (const precision_exhausted &e) {
        out.result = verdict::indeterminate;
        out.reason = e.what();
        return out;
    } catch (const std::overflow_error &e) {
        out.result = verdict::indeterminate;
        out.reason = e.what();
        return out;
    }
    bool violated = false;
    for (const auto &lambda : lambdas) {
        auto report = weyl_sum(values, lambda);
        if (sustained_above(report.trajectory, thresholds)) {
            violated = true;
            out.reason += "weyl sum at lambda=" + lambda.text() + " stays above threshold; ";
        }
        out.irrational_probes.push_back({report.lambda, report.magnitude, std::move(report.trajectory)});
    }
    const auto checkpoints = geometric_checkpoints(n);
    for (auto m : moduli) {
        if (m < 1) {
            throw std::invalid_argument("norm_ergodic_probe: modulus must be at least 1");
        }
        residue_probe probe{m, 0.0, {}};
        residue_histogram h;
        h.modulus = m;
        h.counts.assign(m, 0);
        std::size_t next = 0;
        const auto mm = static_cast<std::int64_t>(m);
        for (std::size_t i = 0; i < values.size(); ++i) {
            auto r = values[i] % mm;
            if (r < 0) {
                r += mm;
            }
            ++h.counts[static_cast<std::size_t>(r)];
            h.n = i + 1;
            if (next < checkpoints.size() && checkpoints[next] == h.n) {
                double worst = 0.0;
                for (std::uint64_t k = 1; k < m; ++k) {
                    worst = std::max(worst, weyl_from_histogram(h, k));
                }
                probe.trajectory.push_back({h.n, worst});
                ++next;
            }
        }
        probe.deviation = residue_distribution(values, m).max_deviation;
        if (sustained_above(probe.trajectory, thresholds)) {
            violated = true;
            out.reason += "residues mod " + std::to_string(m) + " are not equidistributed; ";
        }
        out.residue_probes.push_back(std::move(probe));
    }
    out.result = violated ? verdict::violated : verdict::consistent;
    if (!violated) {
        out.reason = "all probes below threshold at horizon " + std::to_string(n) + " (no limit is claimed)";
    }
    return out;
}

std::vector<double> geometric_grid(double x_min, double x_max, std::size_t points)
{
    if (!(x_min > 1.0) || !(x_max > x_min) || points < 2) {
        throw std::invalid_argument("geometric_grid: need 1 < x_min < x_max and at least two points");
    }
    std::vector<double> grid;
    const double step = std::log(x_max / x_min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid.push_back(i + 1 == points ? x_max : x_min * std::exp(step * static_cast<double>(i)));
    }
    return grid;
}

std::vector<rational> height_box(std::uint64_t height)
{
    std::set<rational> values;
    const auto h = static_cast<long>(height);
    for (long b = 1; b <= h; ++b) {
        for (long a = -h; a <= h; ++a) {
            rational q(a, b);
            q.canonicalize();
            values.insert(q);
        }
    }
    return {values.begin(), values.end()};
}

boshernitzan_report boshernitzan_probe(const sequence_spec &spec, std::uint64_t degree_bound,
                                       std::uint64_t height_bound, const std::vector<double> &grid)
{
    if (grid.size() < 2) {
        throw std::invalid_argument("boshernitzan_probe: grid needs at least two points");
    }
    constexpr mpfr_prec_t bits = 256;
    const auto box = height_box(height_bound);
    boshernitzan_report report;
    report.degree_bound = degree_bound;
    report.height_bound = height_bound;

    std::vector<real_interval> xs;
    std::vector<real_interval> gs;
    std::vector<real_interval> logs;
    for (double x : grid) {
        rational qx;
        mpq_set_d(qx.get_mpq_t(), x);
        xs.push_back(real_interval::point(qx, bits));
        gs.push_back(spec.eval(xs.back(), bits));
        logs.push_back(log(xs.back()));
    }

    std::vector<std::size_t> digits(degree_bound + 1, 0);
    bool all = true;
    while (true) {
        polynomial_probe probe;
        for (auto d : digits) {
            probe.coeffs.push_back(box[d]);
        }
        probe.grid = grid;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto p = real_interval::point(probe.coeffs.back(), bits);
            for (std::size_t k = probe.coeffs.size() - 1; k-- > 0;) {
                p = p * xs[i] + real_interval::point(probe.coeffs[k], bits);
            }
            probe.ratios.push_back(((gs[i] - p) / logs[i]).midpoint());
        }
        // Monotone divergence over the second half of the grid.
        const std::size_t start = grid.size() / 2;
        bool diverges = true;
        const double sign = probe.ratios[start] > 0 ? 1.0 : -1.0;
        for (std::size_t i = start; i < grid.size(); ++i) {
            const double r = probe.ratios[i];
            if (r == 0.0 || (r > 0 ? 1.0 : -1.0) != sign) {
                diverges = false;
                break;
            }
            if (i > start && !(std::abs(r) > std::abs(probe.ratios[i - 1]))) {
                diverges = false;
                break;
            }
        }
        probe.diverges = diverges;
        all = all && diverges;
        report.probes.push_back(std::move(probe));

        std::size_t pos = 0;
        while (pos < digits.size() && ++digits[pos] == box.size()) {
            digits[pos] = 0;
            ++pos;
        }
        if (pos == digits.size()) {
            break;
        }
    }
    report.all_diverge = all;
    return report;
}

} // namespace ergodiff
