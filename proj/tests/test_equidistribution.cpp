#include <doctest.h>

#include <ergodiff/equidistribution.hpp>
#include <ergodiff/sequences.hpp>

#include <cmath>
#include <complex>
#include <numeric>
#include <random>

using namespace ergodiff;

namespace
{
std::vector<std::int64_t> identity_values(std::int64_t n, std::int64_t step = 1)
{
    std::vector<std::int64_t> v(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = (i + 1) * step;
    }
    return v;
}

// long double reference, fine for small |lambda a_n|
double naive_weyl(const std::vector<std::int64_t> &v, long double lambda)
{
    std::complex<long double> s = 0;
    for (auto a : v) {
        const long double t = lambda * static_cast<long double>(a);
        const long double f = t - std::floor(t);
        s += std::polar<long double>(1.0L, 2 * 3.14159265358979323846264338327950288L * f);
    }
    return static_cast<double>(std::abs(s) / static_cast<long double>(v.size()));
}
} // namespace

TEST_CASE("weyl_sum examples")
{
    const auto v = identity_values(1000);
    CHECK(weyl_sum(v, real_constant::parse("1")).magnitude == doctest::Approx(1.0).epsilon(1e-12));
    const auto ten = identity_values(10);
    CHECK(weyl_sum(ten, real_constant::parse("1/2")).magnitude < 1e-12);

    const auto p32 = floor_values(sequence_spec::parse("pow:3/2"), 100000);
    const auto rep = weyl_sum(p32, real_constant::parse("sqrt2-1"));
    CHECK(rep.magnitude < 0.05);
    CHECK(rep.n == 100000);
    for (const auto &c : rep.trajectory) {
        CHECK(c.magnitude >= 0);
        CHECK(c.magnitude <= 1 + 1e-12);
    }
    CHECK(rep.trajectory.back().m == 100000);
}

TEST_CASE("weyl_sum matches a long double reference")
{
    const auto v = floor_values(sequence_spec::parse("pow:3/2"), 3000);
    const long double lambda = 0.41421356237309504880168872420969807857L;
    CHECK(weyl_sum(v, real_constant::parse("sqrt2-1")).magnitude == doctest::Approx(naive_weyl(v, lambda)).epsilon(1e-9));
}

TEST_CASE("weyl_sum is invariant under integer shifts of lambda")
{
    std::mt19937_64 rng(5);
    const auto v = floor_values(sequence_spec::parse("pow:3/2"), 10000);
    for (int trial = 0; trial < 20; ++trial) {
        const auto num = static_cast<long>(rng() % 1000003);
        const std::string base = std::to_string(num) + "/1000003";
        const std::string shifted = base + "+" + std::to_string(1 + rng() % 50);
        const double a = weyl_sum(v, real_constant::parse(base)).magnitude;
        const double b = weyl_sum(v, real_constant::parse(shifted)).magnitude;
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("residue_distribution examples")
{
    const auto h = residue_distribution(identity_values(1000), 4);
    CHECK(h.counts == std::vector<std::uint64_t>{250, 250, 250, 250});
    CHECK(h.max_deviation == 0);

    const auto e = residue_distribution(identity_values(100, 2), 2);
    CHECK(e.counts == std::vector<std::uint64_t>{100, 0});
    CHECK(e.max_deviation == doctest::Approx(0.5));

    // at 10^5 the deviation for m = 5 is still 0.01103; it drops below 0.01 by 10^6
    const auto p32 = floor_values(sequence_spec::parse("pow:3/2"), 1000000);
    const auto short_run = residue_distribution(std::span<const std::int64_t>(p32).first(100000), 5);
    CHECK(short_run.counts == std::vector<std::uint64_t>{21103, 19930, 19819, 19836, 19312});
    const auto h5 = residue_distribution(p32, 5);
    CHECK(h5.counts == std::vector<std::uint64_t>{206204, 199441, 199170, 198733, 196452});
    CHECK(h5.max_deviation < 0.01);
}

TEST_CASE("residue histogram rotates under translation")
{
    std::mt19937_64 rng(9);
    const auto v = floor_values(sequence_spec::parse("nlogn"), 5000);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t m = 2 + rng() % 11;
        const std::int64_t c = static_cast<std::int64_t>(rng() % 1000) - 500;
        auto shifted = v;
        for (auto &x : shifted) {
            x += c;
        }
        const auto h0 = residue_distribution(v, m);
        const auto h1 = residue_distribution(shifted, m);
        CHECK(std::accumulate(h0.counts.begin(), h0.counts.end(), std::uint64_t{0}) == v.size());
        const auto cm = static_cast<std::uint64_t>(((c % static_cast<std::int64_t>(m)) + static_cast<std::int64_t>(m)) % static_cast<std::int64_t>(m));
        for (std::uint64_t j = 0; j < m; ++j) {
            REQUIRE(h1.counts[(j + cm) % m] == h0.counts[j]);
        }
    }
}

TEST_CASE("rational weyl sums agree with the residue histogram")
{
    const auto v = floor_values(sequence_spec::parse("pow:3/2"), 20000);
    for (std::uint64_t m = 2; m <= 7; ++m) {
        const auto h = residue_distribution(v, m);
        for (std::uint64_t j = 1; j < m; ++j) {
            const auto lambda = real_constant::parse(std::to_string(j) + "/" + std::to_string(m));
            CHECK(std::abs(weyl_sum(v, lambda).magnitude - weyl_from_histogram(h, j)) < 1e-9);
        }
    }
}

TEST_CASE("star_discrepancy examples and lower bound")
{
    CHECK(star_discrepancy({0.0}) == doctest::Approx(1.0));
    std::vector<double> grid;
    for (int k = 0; k < 10; ++k) {
        grid.push_back(k / 10.0);
    }
    CHECK(star_discrepancy(grid) == doctest::Approx(0.1));
    std::vector<double> golden;
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int k = 1; k <= 100; ++k) {
        golden.push_back(std::fmod(k * phi, 1.0));
    }
    CHECK(star_discrepancy(golden) < 0.05);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> pts(1 + rng() % 200);
        for (auto &p : pts) {
            p = u(rng);
        }
        CHECK(star_discrepancy(pts) >= 1.0 / (2.0 * static_cast<double>(pts.size())) - 1e-15);
    }
}

TEST_CASE("norm_ergodic_probe verdicts")
{
    const std::vector<std::uint64_t> moduli{2, 3, 4, 5};
    auto v = norm_ergodic_probe(sequence_spec::parse("pow:3/2"), 100000, {real_constant::parse("sqrt2-1")}, moduli);
    CHECK(v.result == verdict::consistent);

    v = norm_ergodic_probe(sequence_spec::parse("poly:0,0,1"), 10000, {}, {4});
    CHECK(v.result == verdict::violated);

    v = norm_ergodic_probe(sequence_spec::parse("pow:1/1"), 10000, default_lambda_probes(), moduli);
    CHECK(v.result == verdict::consistent);
}

TEST_CASE("geometric checkpoints")
{
    CHECK(geometric_checkpoints(10) == std::vector<std::uint64_t>{1, 2, 4, 8, 10});
    CHECK(geometric_checkpoints(8) == std::vector<std::uint64_t>{1, 2, 4, 8});
}

TEST_CASE("boshernitzan_probe examples")
{
    const auto grid = geometric_grid(10, 1e6, 24);
    const auto r = boshernitzan_probe(sequence_spec::parse("pow:3/2"), 1, 3, grid);
    CHECK(r.all_diverge);
    CHECK(r.heuristic);

    const auto id = boshernitzan_probe(sequence_spec::parse("pow:1/1"), 1, 1, grid);
    CHECK_FALSE(id.all_diverge);
    bool found = false;
    for (const auto &p : id.probes) {
        if (p.coeffs == std::vector<rational>{0, 1}) {
            found = true;
            CHECK_FALSE(p.diverges);
            for (double x : p.ratios) {
                CHECK(x == 0);
            }
        }
    }
    CHECK(found);

    const auto lg = boshernitzan_probe(sequence_spec::parse("logpow:2"), 0, 1, grid);
    for (const auto &p : lg.probes) {
        if (p.coeffs == std::vector<rational>{0}) {
            CHECK(p.diverges);
            CHECK(p.ratios.back() == doctest::Approx(std::log(1e6)).epsilon(1e-6));
        }
    }
}

TEST_CASE("height_box is deduplicated and sorted")
{
    const auto h = height_box(2);
    // -2, -1, -1/2, 0, 1/2, 1, 2
    CHECK(h.size() == 7);
    CHECK(std::is_sorted(h.begin(), h.end()));
}
