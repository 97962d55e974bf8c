#include <doctest.h>

#include <ergodiff/errors.hpp>
#include <ergodiff/folner.hpp>
#include <ergodiff/int_expr.hpp>

#include <array>
#include <cmath>
#include <random>
#include <set>
#include <unordered_set>

using namespace ergodiff;

namespace
{
using elem = semigroup_element;

// |∪_{k<n} F_k^{-1} F_n| by pairs, through the public group law only
std::size_t brute_quotient(const folner_family &fam, std::uint64_t n)
{
    std::set<elem> out;
    const auto fn = fam.elements(n);
    for (std::uint64_t k = 1; k < n; ++k) {
        for (const auto &x : *fam.elements(k)) {
            const auto xi = inv(to_group_of_quotients(x));
            for (const auto &y : *fn) {
                out.insert(mul(xi, to_group_of_quotients(y)));
            }
        }
    }
    return out.size();
}

struct triple_hash {
    std::size_t operator()(const std::array<long, 3> &t) const noexcept
    {
        return static_cast<std::size_t>(t[0] * 1000003 + t[1] * 10007 + t[2]);
    }
};

// Heisenberg box by hand: |a|,|b| <= n, |c| <= n^2, quotient via explicit formula
std::size_t heis_oracle(long n)
{
    std::unordered_set<std::array<long, 3>, triple_hash> seen;
    const long p0 = n - 1;
    const long q0 = (n - 1) * (n - 1);
    const long p1 = n;
    const long q1 = n * n;
    for (long x = -p0; x <= p0; ++x) {
        for (long y = -p0; y <= p0; ++y) {
            for (long z = -q0; z <= q0; ++z) {
                // (x,y,z)^-1 = (-x,-y,xy-z)
                for (long a = -p1; a <= p1; ++a) {
                    for (long b = -p1; b <= p1; ++b) {
                        for (long c = -q1; c <= q1; ++c) {
                            seen.insert({a - x, b - y, x * y - z + c - x * b});
                        }
                    }
                }
            }
        }
    }
    return seen.size();
}
} // namespace

TEST_CASE("family parsing and canonical text")
{
    CHECK(folner_family::parse("interval:a=1,b=n").text() == "interval:a=1,b=n");
    CHECK(folner_family::parse("multbox:paper").text() == "multbox:paper");
    CHECK(folner_family::parse("multbox:f=n^n").text() == "multbox:f=n^n");
    CHECK(folner_family::parse("multbox:eps=1/2").text() == "multbox:eps=1/2");
    CHECK(folner_family::parse("heisbox").text() == "heisbox:p=n,q=n^2");
    CHECK(folner_family::parse("chain:sym").text() == "chain:sym");
    CHECK(folner_family::parse("chain:polyheis:q=2").text() == "chain:polyheis:q=2");
    CHECK_THROWS(folner_family::parse("nope"));
    CHECK_THROWS(folner_family::parse("multbox:eps=-1"));
}

TEST_CASE("int_expr evaluation")
{
    CHECK(int_expr::parse("n^n").eval(5) == 3125);
    CHECK(int_expr::parse("2^3^2").eval(0) == 512);
    CHECK(int_expr::parse("-(n-3)*2").eval(10) == -14);
    CHECK(int_expr::parse(" n ^ 2 + n ").text() == "n^2+n");
    CHECK_THROWS(int_expr::parse("n+"));
    CHECK_THROWS(int_expr::parse("2^n").eval(2000000));
}

TEST_CASE("closed-form cardinalities match enumeration")
{
    for (const char *text : {"interval:a=n^2,b=n^2+n", "multbox:paper", "multbox:f=n^n", "multbox:eps=1/2", "heisbox",
                             "chain:sym", "chain:polyheis:q=2"}) {
        const auto fam = folner_family::parse(text);
        const std::uint64_t top = std::string(text) == "heisbox" ? 6 : (std::string(text) == "chain:sym" ? 5 : 2);
        for (std::uint64_t n = 1; n <= top; ++n) {
            const auto e = fam.elements(n);
            CAPTURE(std::string(text));
            CAPTURE(n);
            REQUIRE(bigint(std::to_string(e->size())) == fam.cardinality(n));
            REQUIRE(std::is_sorted(e->begin(), e->end()));
            REQUIRE(std::adjacent_find(e->begin(), e->end()) == e->end());
        }
    }
    const auto h = folner_family::parse("heisbox");
    for (std::uint64_t n = 1; n <= 20; ++n) {
        const bigint nn(std::to_string(n));
        CHECK(h.cardinality(n) == (2 * nn + 1) * (2 * nn + 1) * (2 * nn * nn + 1));
    }
}

TEST_CASE("nesting checked by enumeration")
{
    for (const char *text : {"interval:a=1,b=n", "multbox:paper", "heisbox", "chain:sym", "chain:polyheis:q=3"}) {
        const auto fam = folner_family::parse(text);
        CHECK(fam.nested_through(3));
        const auto a = fam.elements(1);
        const auto b = fam.elements(2);
        CHECK(std::includes(b->begin(), b->end(), a->begin(), a->end()));
    }
    const auto shifted = folner_family::parse("interval:a=n^2,b=n^2+n");
    CHECK_FALSE(shifted.nested_through(3));
}

TEST_CASE("enumeration cap")
{
    const auto fam = folner_family::parse("multbox:paper");
    CHECK_THROWS_AS(fam.elements(3, 1000), enumeration_too_large);
}

TEST_CASE("folner_defect examples and cross-check")
{
    CHECK(folner_defect(folner_family::parse("interval:a=1,b=n"), elem::parse("int:1"), 100) == rational(99, 100));
    CHECK(folner_defect(folner_family::parse("multbox:paper"), elem::parse("natmul:2"), 2) == rational(16, 17));
    for (const char *text : {"interval:a=1,b=n", "multbox:paper", "heisbox", "chain:sym"}) {
        const auto fam = folner_family::parse(text);
        CHECK(folner_defect(fam, identity_like(fam.elements(1)->front()), 2) == 1);
    }

    std::mt19937_64 rng(13);
    const auto heis = folner_family::parse("heisbox");
    for (int trial = 0; trial < 20; ++trial) {
        const elem g(heisenberg{static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 7) - 3,
                                static_cast<long>(rng() % 21) - 10});
        CHECK(folner_defect(heis, g, 3) == folner_defect_enumerated(heis, g, 3));
    }
    const auto mb = folner_family::parse("multbox:paper");
    for (const char *g : {"natmul:2", "natmul:3^5", "natmul:6", "natmul:5", "natmul:2^17"}) {
        CHECK(folner_defect(mb, elem::parse(g), 2) == folner_defect_enumerated(mb, elem::parse(g), 2));
    }
    const auto iv = folner_family::parse("interval:a=n,b=2*n");
    for (long k = -5; k <= 5; ++k) {
        const elem g(int_add{k});
        CHECK(folner_defect(iv, g, 7) == folner_defect_enumerated(iv, g, 7));
    }
}

TEST_CASE("tempered ratio examples")
{
    const auto iv = folner_family::parse("interval:a=1,b=n");
    CHECK(tempered_ratio(iv, 10).ratio == rational(9, 5));

    const auto f = tempered_ratio(folner_family::parse("multbox:f=n^n"), 5);
    const rational expect_base = 1 + rational(256, 3126);
    CHECK(f.ratio == expect_base * expect_base * expect_base * expect_base);
    CHECK(to_double(f.ratio) < std::exp(2.0));

    ratio_options enumerate;
    enumerate.method = ratio_method::enumeration;
    const auto fam = folner_family::parse("multbox:paper");
    const auto closed = tempered_ratio(fam, 2);
    const auto enumd = tempered_ratio(fam, 2, enumerate);
    CHECK(closed.method == ratio_method::closed_form);
    CHECK(enumd.method == ratio_method::enumeration);
    CHECK(closed.quotient_size == enumd.quotient_size);
    CHECK(bigint(std::to_string(brute_quotient(fam, 2))) == closed.quotient_size);
    CHECK(closed.quotient_size == 1722);
}

TEST_CASE("multbox:paper n=3 quotient by coordinate difference sets")
{
    // the box is a product and the group abelian, so the quotient is the
    // product of one-dimensional difference sets
    const auto fam = folner_family::parse("multbox:paper");
    bigint product = 1;
    for (std::uint64_t i = 1; i <= 3; ++i) {
        std::set<long> diffs;
        for (std::uint64_t k = 1; k < 3; ++k) {
            const long lo = fam.box_bound(i, k).get_si();
            const long hi = fam.box_bound(i, 3).get_si();
            for (long x = 0; x <= lo; ++x) {
                for (long y = 0; y <= hi; ++y) {
                    diffs.insert(y - x);
                }
            }
        }
        product *= static_cast<unsigned long>(diffs.size());
    }
    ratio_options enumerate;
    enumerate.method = ratio_method::enumeration;
    const auto e = tempered_ratio(fam, 3, enumerate);
    CHECK(e.quotient_size == product);
    CHECK(tempered_ratio(fam, 3).quotient_size == product);
    CHECK(product == 269136027);
}

TEST_CASE("closed forms agree with enumeration across families")
{
    ratio_options enumerate;
    enumerate.method = ratio_method::enumeration;
    for (const char *text : {"interval:a=1,b=n", "interval:a=n^2,b=n^2+n", "interval:a=n,b=3*n", "multbox:f=n",
                             "multbox:eps=1/2", "heisbox", "chain:sym"}) {
        const auto fam = folner_family::parse(text);
        const bool eps = std::string(text) == "multbox:eps=1/2";
        for (std::uint64_t n = 2; n <= (eps ? 3 : 4); ++n) {
            CAPTURE(std::string(text));
            CAPTURE(n);
            const auto c = tempered_ratio(fam, n);
            const auto e = tempered_ratio(fam, n, enumerate);
            REQUIRE(c.quotient_size == e.quotient_size);
            if (n <= 3 && !eps) {
                REQUIRE(bigint(std::to_string(brute_quotient(fam, n))) == c.quotient_size);
            }
        }
    }
}

TEST_CASE("semigroup mode on (N, +) and (N, *)")
{
    ratio_options semi;
    semi.mode = quotient_mode::semigroup;
    const auto iv = folner_family::parse("interval:a=n,b=2*n");
    for (std::uint64_t n = 2; n <= 6; ++n) {
        for (long g : {0L, 1L, 3L}) {
            semi.g = elem(int_add{g});
            // h >= 1 with k + h = m + g for some k in F_j (j < n), m in F_n
            std::set<long> hs;
            for (std::uint64_t j = 1; j < n; ++j) {
                for (long k = static_cast<long>(j); k <= 2 * static_cast<long>(j); ++k) {
                    for (long m = static_cast<long>(n); m <= 2 * static_cast<long>(n); ++m) {
                        if (m + g - k >= 1) {
                            hs.insert(m + g - k);
                        }
                    }
                }
            }
            semi.method = ratio_method::automatic;
            const auto c = tempered_ratio(iv, n, semi);
            semi.method = ratio_method::enumeration;
            const auto e = tempered_ratio(iv, n, semi);
            REQUIRE(c.quotient_size == static_cast<unsigned long>(hs.size()));
            REQUIRE(e.quotient_size == c.quotient_size);
        }
    }

    const auto mb = folner_family::parse("multbox:paper");
    for (const char *g : {"natmul:1", "natmul:2", "natmul:15"}) {
        semi.g = elem::parse(g);
        semi.method = ratio_method::automatic;
        const auto c = tempered_ratio(mb, 2, semi);
        semi.method = ratio_method::enumeration;
        const auto e = tempered_ratio(mb, 2, semi);
        CHECK(c.quotient_size == e.quotient_size);
        // brute force in (N, *)
        std::set<elem> hs;
        const auto f1 = mb.elements(1);
        std::vector<elem> shifted;
        for (const auto &y : *mb.elements(2)) {
            shifted.push_back(mul(y, elem::parse(g)));
        }
        for (const auto &h : left_quotient_set(*f1, shifted)) {
            hs.insert(h);
        }
        CHECK(bigint(std::to_string(hs.size())) == c.quotient_size);
    }
}

TEST_CASE("Heisenberg quotient counts")
{
    for (long n = 2; n <= 3; ++n) {
        const auto r = heisenberg_quotient_count(static_cast<std::uint64_t>(n));
        CHECK(r.count == static_cast<unsigned long>(heis_oracle(n)));
        CHECK(bigint(std::to_string(brute_quotient(folner_family::parse("heisbox"), static_cast<std::uint64_t>(n))))
              == r.count);
    }
    const std::array<unsigned long, 5> golden{635, 3987, 14163, 37163, 80907};
    for (std::uint64_t n = 2; n <= 6; ++n) {
        const auto r = heisenberg_quotient_count(n);
        CHECK(r.count == golden[n - 2]);
        CHECK(r.count <= r.bound);
        CHECK(r.bound == heisenberg_quotient_bound(n));
        const bigint nn(std::to_string(n));
        CHECK(r.family_size == (2 * nn + 1) * (2 * nn + 1) * (2 * nn * nn + 1));
    }
    CHECK(heisenberg_quotient_bound(2) == 833);
}

TEST_CASE("Heisenberg semigroup form matches group form")
{
    ratio_options semi;
    semi.mode = quotient_mode::semigroup;
    semi.g = elem(heisenberg{1, -2, 3});
    const auto fam = folner_family::parse("heisbox");
    for (std::uint64_t n = 2; n <= 3; ++n) {
        CHECK(tempered_ratio(fam, n, semi).quotient_size == tempered_ratio(fam, n).quotient_size);
        semi.method = ratio_method::enumeration;
        CHECK(tempered_ratio(fam, n, semi).quotient_size == tempered_ratio(fam, n).quotient_size);
        semi.method = ratio_method::automatic;
    }
}

TEST_CASE("chains have ratio one")
{
    ratio_options enumerate;
    enumerate.method = ratio_method::enumeration;
    CHECK(tempered_ratio(folner_family::parse("chain:sym"), 5, enumerate).ratio == 1);
    CHECK(tempered_ratio(folner_family::parse("chain:polyheis:q=2"), 2, enumerate).ratio == 1);
}

TEST_CASE("temperedness scans")
{
    auto r = temperedness_scan(folner_family::parse("multbox:paper"), 40, rational(46, 25));
    CHECK_FALSE(r.first_violation.has_value());
    CHECK(to_double(r.sup) <= 1.8380);
    REQUIRE(r.closed_form_bound.has_value());
    CHECK(*r.closed_form_bound == doctest::Approx(std::sinh(M_PI) / (2 * M_PI)));

    r = temperedness_scan(folner_family::parse("multbox:f=n^2"), 50, rational(100));
    CHECK(r.first_violation.has_value());

    r = temperedness_scan(folner_family::parse("interval:a=1,b=n"), 200, rational(2));
    CHECK_FALSE(r.first_violation.has_value());

    r = temperedness_scan(folner_family::parse("interval:a=n^2,b=n^2+n"), 6, rational(2));
    REQUIRE(r.first_violation.has_value());
    CHECK(*r.first_violation == 3);
}

TEST_CASE("criterion_5_3 examples")
{
    auto c = criterion_5_3(int_expr::parse("n^2"), 50);
    CHECK(c.values.back() == rational(50 * 2500, 2601));
    CHECK(c.trend == "growing");
    c = criterion_5_3(int_expr::parse("n^n"), 50);
    CHECK(c.values[4] == rational(5 * 3125, 46656));
    CHECK(c.trend == "bounded");
    CHECK(to_double(c.max_value) < 0.37);
    CHECK_THROWS(criterion_5_3(int_expr::parse("7"), 20));
    CHECK_THROWS_AS(criterion_5_3(int_expr::parse("100-n"), 20), not_nondecreasing);
}
