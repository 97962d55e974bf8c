#include <doctest.h>

#include <ergodiff/dynamics.hpp>
#include <ergodiff/errors.hpp>
#include <ergodiff/sequences.hpp>

#include <random>

using namespace ergodiff;

namespace
{
// mpq_class(num, den) does not canonicalize
rational q(long num, long den)
{
    rational r(num, den);
    r.canonicalize();
    return r;
}

rational frac(const rational &x)
{
    return x - rational(floor(x));
}

// measure of [a, b) ∩ [c, d) on the line
rational overlap(const rational &a, const rational &b, const rational &c, const rational &d)
{
    const rational lo = a > c ? a : c;
    const rational hi = b < d ? b : d;
    return hi > lo ? rational(hi - lo) : rational(0);
}

// μ(A ∩ (A + θ)) for a union of disjoint arcs, exact; arcs unrolled onto [0, 2)
rational arcs_overlap_exact(const std::vector<arc> &arcs, const rational &theta)
{
    std::vector<std::pair<rational, rational>> a;
    for (const auto &x : arcs) {
        const rational s = frac(x.start);
        a.emplace_back(s, s + x.length);
        a.emplace_back(s - 1, s + x.length - 1);
        a.emplace_back(s + 1, s + x.length + 1);
    }
    const rational t = frac(theta);
    rational total = 0;
    for (const auto &x : arcs) {
        const rational s = frac(x.start) + t;
        for (const auto &[lo, hi] : a) {
            total += overlap(s, s + x.length, lo, hi);
        }
    }
    return total;
}

std::vector<std::int64_t> identity_values(std::int64_t n)
{
    std::vector<std::int64_t> v;
    for (std::int64_t i = 1; i <= n; ++i) {
        v.push_back(i);
    }
    return v;
}
} // namespace

TEST_CASE("system and observable parsing")
{
    CHECK(rotation_system::parse("circle:alpha=sqrt2-1").text() == "circle:alpha=sqrt2-1");
    CHECK(rotation_system::parse("circle:sqrt2-1").text() == "circle:alpha=sqrt2-1");
    CHECK(rotation_system::parse("cyclic:m=4").text() == "cyclic:m=4");
    const auto p = rotation_system::parse("product:circle:alpha=sqrt2-1|cyclic:m=3");
    CHECK(p.arity() == 2);
    CHECK(rotation_system::parse(p.text()).text() == p.text());
    CHECK_THROWS(rotation_system::parse("cyclic:m=0"));
    CHECK_THROWS(observable::parse("arcs:0,0.75;0.5,0.5"));
    CHECK_THROWS(observable::parse("arc:0,2"));
    const auto obs = observable::parse("arcs:0,1/4;1/2,1/4");
    CHECK(obs.measures(rotation_system::parse("circle:alpha=1/3")) == std::vector<rational>{rational(1, 2)});
    CHECK(observable::parse("res:0,2").measures(rotation_system::parse("cyclic:m=4")) == std::vector<rational>{rational(1, 2)});
}

TEST_CASE("orbit averages with rational rotation are exact")
{
    std::mt19937_64 rng(2);
    const auto values = floor_values(sequence_spec::parse("pow:3/2"), 2000);
    for (int trial = 0; trial < 20; ++trial) {
        const rational alpha = q(static_cast<long>(1 + rng() % 50), 51L);
        const rational s = q(static_cast<long>(rng() % 97), 97L);
        const rational l = q(static_cast<long>(1 + rng() % 60), 61L);
        const rational x0 = q(static_cast<long>(rng() % 89), 89L);
        std::uint64_t hits = 0;
        for (auto a : values) {
            const rational pt = frac(x0 + alpha * a);
            const rational rel = frac(pt - s);
            hits += rel < l;
        }
        const auto sys = rotation_system::parse("circle:alpha=" + to_string(alpha));
        const auto obs = observable::parse("arc:" + to_string(s) + "," + to_string(l));
        const auto rep = orbit_average_report_of(sys, start_point::parse(to_string(x0)), obs, values);
        REQUIRE(rep.boundary_failures == 0);
        REQUIRE(rep.hits == hits);
    }
}

TEST_CASE("cyclic averages over whole periods equal the observable's share")
{
    for (std::uint64_t m = 1; m <= 9; ++m) {
        const auto sys = rotation_system::parse("cyclic:m=" + std::to_string(m));
        const auto obs = observable::parse("res:0");
        const auto v = identity_values(static_cast<std::int64_t>(m * 100));
        CHECK(orbit_average(sys, start_point::origin(sys), obs, v) == doctest::Approx(1.0 / static_cast<double>(m)));
    }
    const auto sys = rotation_system::parse("cyclic:m=4");
    const auto v = identity_values(400);
    CHECK(orbit_average(sys, start_point::origin(sys), observable::parse("res:1,3"), v) == doctest::Approx(0.5));
}

TEST_CASE("irrational orbit average along [n^{3/2}]")
{
    const auto values = floor_values(sequence_spec::parse("pow:3/2"), 100000);
    const auto sys = rotation_system::parse("circle:alpha=sqrt2-1");
    const auto rep = orbit_average_report_of(sys, start_point::origin(sys), observable::parse("arc:0,1/2"), values);
    CHECK(rep.boundary_failures == 0);
    CHECK(std::abs(rep.average - 0.5) < 0.01);
}

TEST_CASE("boundary hits are reported, not guessed")
{
    const auto sys = rotation_system::parse("circle:alpha=1/4");
    const auto obs = observable::parse("arc:0,1/2");
    const auto v = identity_values(8);
    // exact rational path: no ambiguity, points land on 0, 1/4, 1/2, 3/4
    CHECK(orbit_average(sys, start_point::origin(sys), obs, v) == doctest::Approx(0.5));
}

TEST_CASE("arc_overlap formula and symmetry")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 2000; ++trial) {
        const rational beta = q(static_cast<long>(1 + rng() % 1000), 1000L);
        const rational theta = q(static_cast<long>(rng() % 997), 997L);
        const rational got = arc_overlap(beta, theta);
        REQUIRE(got == arcs_overlap_exact({arc{0, beta}}, theta));
        const rational lo = 2 * beta - 1 > 0 ? rational(2 * beta - 1) : rational(0);
        REQUIRE(got >= lo);
        REQUIRE(got <= beta);
        if (theta != 0) {
            REQUIRE(arc_overlap(beta, 1 - theta) == got);
        }
    }
}

TEST_CASE("fixed-point arc overlap matches the rational formula")
{
    std::mt19937_64 rng(41);
    const rational scale(bigint(1) << 128);
    for (int trial = 0; trial < 2000; ++trial) {
        const rational beta = q(static_cast<long>(1 + rng() % 1023), 1024L);
        const rational theta = q(static_cast<long>(rng() % 4096), 4096L);
        const u128 b = to_u128(floor(beta * scale));
        const u128 t = to_u128(floor(theta * scale));
        REQUIRE(from_u128(arc_overlap_phase(b, t)) == floor(arc_overlap(beta, theta) * scale));
    }
}

TEST_CASE("arcs_overlap agrees with the exact oracle")
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<arc> arcs;
        rational pos = q(static_cast<long>(rng() % 10), 100L);
        for (int k = 0; k < 3; ++k) {
            const rational len = q(static_cast<long>(1 + rng() % 20), 100L);
            arcs.push_back(arc{pos, len});
            pos += len + q(static_cast<long>(1 + rng() % 10), 100L);
        }
        const rational theta = q(static_cast<long>(rng() % 1000), 1000L);
        REQUIRE(arcs_overlap(arcs, to_double(theta)) == doctest::Approx(to_double(arcs_overlap_exact(arcs, theta))).epsilon(1e-9));
    }
}

TEST_CASE("recurrence averages")
{
    const auto values = floor_values(sequence_spec::parse("pow:3/2"), 100000);
    const circle_system c{real_constant::parse("sqrt2-1")};
    for (const char *b : {"3/10", "1/2"}) {
        const rational beta = parse_rational(b);
        const auto r = recurrence_average(c, beta, values);
        CHECK(r.average >= to_double(beta * beta) - 0.01);
        CHECK(r.min_term >= 0);
        CHECK(r.max_term <= to_double(beta) + 1e-12);
        CHECK_FALSE(r.exact);
    }
    const circle_system q{real_constant::parse("2/7")};
    const auto small = floor_values(sequence_spec::parse("pow:3/2"), 700);
    const auto r = recurrence_average(q, rational(2, 5), small);
    CHECK(r.exact);
    rational sum = 0;
    for (auto a : small) {
        sum += arcs_overlap_exact({arc{0, rational(2, 5)}}, rational(2, 7) * a);
    }
    CHECK(r.average == doctest::Approx(to_double(sum / 700)).epsilon(1e-12));
}

TEST_CASE("product recurrence factors over coordinates")
{
    const auto values = floor_values(sequence_spec::parse("pow:3/2"), 500);
    const auto sys = rotation_system::parse("product:circle:alpha=1/3|cyclic:m=4");
    const auto obs = observable::parse("arc:0,1/2|res:0,1");
    rational sum = 0;
    for (auto a : values) {
        const rational circle = arcs_overlap_exact({arc{0, rational(1, 2)}}, q(a, 3));
        // residues {0,1} shifted by a mod 4
        const long s = a % 4;
        long common = 0;
        for (long r : {0L, 1L}) {
            const long t = (r + s) % 4;
            common += t == 0 || t == 1;
        }
        sum += circle * q(common, 4);
    }
    CHECK(product_recurrence(sys, obs, values) == doctest::Approx(to_double(sum / 500)).epsilon(1e-12));
    CHECK(product_recurrence(rotation_system::parse("product:circle:alpha=0|circle:alpha=0"),
                             observable::parse("arc:0,1/2|arc:0,1/2"), values)
          == doctest::Approx(0.25));
}
