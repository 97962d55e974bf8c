#include <doctest.h>

#include <ergodiff/numeric.hpp>
#include <ergodiff/phase.hpp>
#include <ergodiff/real.hpp>

#include <random>

using namespace ergodiff;

TEST_CASE("integer_root examples")
{
    CHECK(integer_root(8, 3) == 2);
    CHECK(integer_root(125, 2) == 11);
    CHECK(integer_root(bigint("1000000000000000000"), 2) == bigint("1000000000"));
    CHECK(integer_root(0, 5) == 0);
    CHECK(integer_root(1, 7) == 1);
}

TEST_CASE("integer_root brackets x for random inputs")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        bigint x = 0;
        const int words = 1 + static_cast<int>(rng() % 4);
        for (int w = 0; w < words; ++w) {
            x = (x << 64) + bigint(std::to_string(rng()));
        }
        const unsigned long q = 1 + rng() % 9;
        const bigint r = integer_root(x, q);
        CHECK(ipow(r, q) <= x);
        CHECK(ipow(r + 1, q) > x);
    }
}

TEST_CASE("isqrt agrees with the GMP root")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5000; ++trial) {
        const u128 x = (static_cast<u128>(rng()) << 64) | rng();
        const u128 y = trial % 2 ? x : (x >> (rng() % 128));
        CHECK(bigint(std::to_string(isqrt(y))) == integer_root(from_u128(y), 2));
    }
    CHECK(isqrt(0) == 0);
    CHECK(isqrt(~static_cast<u128>(0)) == 0xFFFFFFFFFFFFFFFFull);
}

TEST_CASE("u128 round trip and int64 overflow")
{
    const u128 big = (static_cast<u128>(0xDEADBEEFull) << 70) + 12345;
    CHECK(to_u128(from_u128(big)) == big);
    CHECK(to_int64(bigint(-42)) == -42);
    CHECK_THROWS_AS(to_int64(bigint(1) << 70), std::overflow_error);
}

TEST_CASE("rational parsing and floors")
{
    CHECK(parse_rational("3/6") == rational(1, 2));
    CHECK(parse_rational("0.125") == rational(1, 8));
    CHECK(parse_rational("-2") == rational(-2));
    CHECK(floor(rational(-1, 3)) == -1);
    CHECK(floor(rational(7, 2)) == 3);
    CHECK(mod_floor(-7, 4) == 1);
    CHECK(to_double(rational(1, 100)) == 0.01);
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("real constants enclose their values")
{
    const auto s = real_constant::parse("sqrt2-1");
    CHECK_FALSE(s.exact().has_value());
    const auto iv = s.eval(256);
    CHECK(iv.lo_rational() < iv.hi_rational());
    CHECK(iv.midpoint() == doctest::Approx(0.41421356237309503));
    const auto golden = real_constant::parse("(sqrt(5)-1)/2");
    CHECK(golden.approx() == doctest::Approx(0.6180339887498949));
    const auto pi3 = real_constant::parse("pi-3");
    CHECK(pi3.approx() == doctest::Approx(0.14159265358979312));
    const auto q = real_constant::parse("3/2");
    REQUIRE(q.exact().has_value());
    CHECK(*q.exact() == rational(3, 2));
    CHECK(q.eval(64).is_point());
}

TEST_CASE("interval width shrinks with precision")
{
    const auto s = real_constant::parse("sqrt2");
    CHECK(s.eval(512).width() < s.eval(64).width());
}

TEST_CASE("phase multiplication error stays within the stated bound")
{
    const rational alpha(7, 19);
    const phase p = to_phase(alpha);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::int64_t a = static_cast<std::int64_t>(rng() % 2000000) - 1000000;
        const rational exact = alpha * a;
        const rational frac = exact - rational(floor(exact));
        const bigint scaled = floor(frac * rational(bigint(1) << 128));
        const bigint got = from_u128(phase_times(p, a));
        bigint diff = scaled - got;
        // wraparound near 0/1
        const bigint mod = bigint(1) << 128;
        diff = mod_floor(diff, mod);
        if (diff > mod / 2) {
            diff -= mod;
        }
        CHECK(abs(diff) <= from_u128(phase_error(p, a)));
    }
}
