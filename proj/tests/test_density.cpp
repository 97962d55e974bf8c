#include <doctest.h>

#include <ergodiff/density.hpp>
#include <ergodiff/errors.hpp>
#include <ergodiff/folner.hpp>
#include <ergodiff/sequences.hpp>

#include <gmpxx.h>

#include <random>
#include <set>

using namespace ergodiff;

namespace
{
windowed_set random_set(std::mt19937_64 &rng, std::uint64_t horizon, double p)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return windowed_set::from_predicate(set_domain::naturals, horizon, [&](std::int64_t) { return u(rng) < p; });
}

// independent of the library: isqrt via GMP on the test side
bool oracle_3_13(std::uint64_t n)
{
    mpz_class r;
    mpz_class x(std::to_string(4 * n));
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    mpz_class v = 2 * mpz_class(std::to_string(n)) + r;
    return mpz_class(v % 4) == 0;
}

bool oracle_3_14(std::uint64_t n)
{
    mpz_class nn(std::to_string(n));
    mpz_class cube = nn * nn * nn;
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), cube.get_mpz_t());
    return mpz_even_p(r.get_mpz_t()) != 0;
}
} // namespace

TEST_CASE("windowed_density examples")
{
    const auto fam = folner_family::parse("interval:a=1,b=n");
    const auto s = build_set("mult:4", set_domain::naturals, 10000);
    const auto d = windowed_density(s, fam, 1000);
    CHECK(d.ratios.back() == rational(1, 4));

    const auto all = windowed_density(build_set("all", set_domain::naturals, 500), fam, 500);
    for (const auto &r : all.ratios) {
        CHECK(r == 1);
    }

    const auto sq = windowed_density(build_set("squares", set_domain::naturals, 10000), fam, 10000);
    CHECK(sq.ratios.back() == rational(1, 100));
    CHECK(sq.tail_start == 8001);

    CHECK_THROWS_AS(windowed_density(s, fam, 10001), family_exceeds_window);
    CHECK_THROWS_AS(windowed_density(s, folner_family::parse("multbox:paper"), 2), tag_mismatch);
}

TEST_CASE("densities of a set and its complement sum to one")
{
    std::mt19937_64 rng(23);
    const auto fam = folner_family::parse("interval:a=n,b=3*n");
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_set(rng, 900, 0.3);
        const auto a = windowed_density(s, fam, 300);
        const auto b = windowed_density(s.complement(), fam, 300);
        for (std::size_t i = 0; i < a.ratios.size(); ++i) {
            REQUIRE(a.ratios[i] + b.ratios[i] == 1);
            REQUIRE(a.ratios[i] >= 0);
            REQUIRE(a.ratios[i] <= 1);
        }
    }
}

TEST_CASE("delta1 examples")
{
    const std::vector<std::int64_t> m{1, 2, 4};
    const auto s = windowed_set::from_members(set_domain::naturals, 10, m);
    const auto d = delta1(s);
    CHECK(d.domain() == set_domain::integers);
    std::vector<std::int64_t> nonneg;
    for (auto x : d.members()) {
        if (x >= 0) {
            nonneg.push_back(x);
        }
    }
    CHECK(nonneg == std::vector<std::int64_t>{0, 1, 2, 3});

    const auto evens = delta1(build_set("mult:2", set_domain::naturals, 100));
    for (std::int64_t x = -99; x <= 99; ++x) {
        REQUIRE(evens.contains(x) == (x % 2 == 0 && x >= -98 && x <= 98));
    }

    const std::vector<std::int64_t> five{5};
    CHECK(delta1(windowed_set::from_members(set_domain::naturals, 10, five)).members() == std::vector<std::int64_t>{0});
}

TEST_CASE("delta1 equals a pairs scan on random sets")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t horizon = 1 + rng() % 2000;
        const double p = u(rng) * (trial % 3 == 0 ? 0.01 : 0.2);
        const auto s = random_set(rng, horizon, p);
        const auto fast = delta1(s);
        std::set<std::int64_t> diffs;
        const auto mem = s.members();
        for (auto a : mem) {
            for (auto b : mem) {
                diffs.insert(a - b);
            }
        }
        const auto got = fast.members();
        REQUIRE(std::vector<std::int64_t>(diffs.begin(), diffs.end()) == got);
        REQUIRE(fast == delta1_bruteforce(s));
        for (auto x : got) {
            REQUIRE(fast.contains(-x));
        }
        if (!mem.empty()) {
            REQUIRE(fast.contains(0));
        }
    }
}

TEST_CASE("delta2_g characterizations")
{
    delta2_options opt;
    opt.theta = 0.1;
    opt.n_max = 1000;
    const auto s4 = build_set("mult:4", set_domain::naturals, 100000);
    const auto d13 = delta2_g(s4, sequence_spec::parse("affsqrt:2,2"), opt);
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        REQUIRE(d13.contains(static_cast<std::int64_t>(n)) == oracle_3_13(n));
    }

    const auto s2 = build_set("mult:2", set_domain::naturals, 100000);
    const auto d14 = delta2_g(s2, sequence_spec::parse("pow:3/2"), opt);
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        REQUIRE(d14.contains(static_cast<std::int64_t>(n)) == oracle_3_14(n));
    }

    opt.n_max = 200;
    const auto all = delta2_g(build_set("all", set_domain::naturals, 20000), sequence_spec::parse("nlogn"), opt);
    CHECK(all.count() == 200);
}

TEST_CASE("delta3_count examples")
{
    CHECK(delta3_count(build_set("mult:4", set_domain::naturals, 100), 4) == 24);
    const std::vector<std::int64_t> one{1};
    CHECK(delta3_count(windowed_set::from_members(set_domain::naturals, 50, one), 1) == 0);
    CHECK(delta3_count(build_set("all", set_domain::naturals, 77), 1) == 76);
}

TEST_CASE("gap and run statistics")
{
    const auto g = gap_run_stats_of(build_set("mult:4", set_domain::naturals, 100));
    CHECK(g.max_gap == 4);
    CHECK(g.max_run == 1);
    CHECK(g.gap_histogram.at(4) == 24);

    std::vector<std::int64_t> block;
    for (int i = 1; i <= 50; ++i) {
        block.push_back(i);
    }
    CHECK(gap_run_stats_of(windowed_set::from_members(set_domain::naturals, 80, block)).max_run == 50);

    const auto d = gap_run_stats_of(build_set("floor-even:pow:3/2", set_domain::naturals, 100000));
    CHECK(d.max_gap >= 8);
    CHECK(d.max_run >= 8);
    // golden values from a direct scan
    CHECK(d.max_gap == 53);
    CHECK(d.max_run == 59);
}

TEST_CASE("D_g and D_{3/2} membership predicates")
{
    CHECK(member_3_13(1));
    CHECK_FALSE(member_3_13(2));
    for (std::uint64_t n = 1; n <= 200000; ++n) {
        REQUIRE(member_3_13(n) == oracle_3_13(n));
        REQUIRE(member_3_14(n) == oracle_3_14(n));
    }
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20000; ++trial) {
        const std::uint64_t n = 1 + rng() % 4000000000000ULL;
        REQUIRE(member_3_13(n) == member_3_13_mpz(n));
        REQUIRE(member_3_14(n) == member_3_14_mpz(n));
    }
}

TEST_CASE("D_g scan finds no consecutive members")
{
    const auto r = verify_example_3_13(100000);
    CHECK(r.violations.empty());
    std::uint64_t members = 0;
    for (std::uint64_t n = 1; n <= 100000; ++n) {
        members += oracle_3_13(n);
    }
    CHECK(r.members == members);
}

TEST_CASE("find_gap_3_14")
{
    const auto r0 = find_gap_3_14(0, 1000);
    REQUIRE(r0.m.has_value());
    CHECK(*r0.m == 1);
    CHECK_FALSE(oracle_3_14(1));

    for (std::uint64_t run : {1, 5, 8}) {
        const auto r = find_gap_3_14(run, 10000000);
        REQUIRE(r.m.has_value());
        CHECK(r.verified);
        for (std::uint64_t k = 0; k <= run; ++k) {
            REQUIRE_FALSE(oracle_3_14(*r.m + k));
        }
        // least such M
        for (std::uint64_t m = 1; m < *r.m; ++m) {
            bool all_out = true;
            for (std::uint64_t k = 0; k <= run && all_out; ++k) {
                all_out = !oracle_3_14(m + k);
            }
            REQUIRE_FALSE(all_out);
        }
    }
    CHECK_FALSE(find_gap_3_14(12, 100).m.has_value());
}

TEST_CASE("cover_search examples")
{
    const auto e4 = delta1(build_set("mult:4", set_domain::naturals, 1000));
    auto c = cover_search(e4, 100);
    REQUIRE(c.has_value());
    CHECK(c->ell == 4);
    auto t = c->translates;
    std::sort(t.begin(), t.end());
    CHECK(t == std::vector<std::int64_t>{0, 1, 2, 3});
    CHECK(c->verified);
    CHECK(c->minimal);

    const auto z = build_set("all", set_domain::integers, 200);
    c = cover_search(z, 100);
    REQUIRE(c.has_value());
    CHECK(c->ell == 1);
    CHECK(c->translates == std::vector<std::int64_t>{0});

    const std::vector<std::int64_t> m{1, 2, 4};
    const auto d = delta1(windowed_set::from_members(set_domain::naturals, 10, m));
    c = cover_search(d, 3);
    REQUIRE(c.has_value());
    CHECK(c->ell <= 2);
}

TEST_CASE("cover certificates re-verify on random sets")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = random_set(rng, 200, 0.1 + 0.02 * (trial % 10));
        const auto e = delta1(s);
        const auto c = cover_search(e, 40);
        if (!c) {
            continue;
        }
        CHECK(verify_cover(e, *c));
        // independent check
        for (std::int64_t x = c->target_lo; x <= c->target_hi; ++x) {
            bool hit = false;
            for (auto t : c->translates) {
                hit = hit || e.contains(x - t);
            }
            REQUIRE(hit);
        }
    }
}

TEST_CASE("intersection_density")
{
    const auto fam = folner_family::parse("interval:a=1,b=n");
    const auto s4 = build_set("mult:4", set_domain::naturals, 4000);
    const std::vector<std::int64_t> shifts{4, 8};
    const auto d = intersection_density(s4, shifts, fam, 3000);
    CHECK(d.ratios[999] == rational(1, 4));
    const auto none = intersection_density(s4, {}, fam, 3000);
    CHECK(none.ratios == windowed_density(s4, fam, 3000).ratios);
    const std::vector<std::int64_t> one{1};
    const auto z = intersection_density(build_set("mult:2", set_domain::naturals, 1000), one, fam, 500);
    for (const auto &r : z.ratios) {
        CHECK(r == 0);
    }
}

TEST_CASE("serialization round trips")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_set(rng, 1 + rng() % 3000, 0.4);
        CHECK(from_rle_json(to_rle_json(s)) == s);
        CHECK(from_lines(to_lines(s), set_domain::naturals, s.horizon()) == s);
    }
    const auto z = delta1(build_set("mult:3", set_domain::naturals, 30));
    CHECK(from_rle_json(to_rle_json(z)) == z);
}

TEST_CASE("membership predicates do not depend on the precision policy")
{
    delta2_options a;
    a.n_max = 300;
    a.theta = 0.1;
    delta2_options b = a;
    b.precision.start_bits = 1024;
    b.precision.cap_bits = 8192;
    const auto s = build_set("mult:4", set_domain::naturals, 20000);
    CHECK(delta2_g(s, sequence_spec::parse("affsqrt:2,2"), a) == delta2_g(s, sequence_spec::parse("affsqrt:2,2"), b));
    CHECK(build_set("example-3-13", set_domain::naturals, 5000) == build_set("example-3-13", set_domain::naturals, 5000));
}
