#include <doctest.h>

#include <ergodiff/bitset.hpp>

#include <random>

using namespace ergodiff;

namespace
{
bitvec random_bits(std::mt19937_64 &rng, std::size_t n, unsigned percent)
{
    bitvec b(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng() % 100 < percent) {
            b.set(i);
        }
    }
    return b;
}
} // namespace

TEST_CASE("kernels agree with bit-by-bit loops")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 700;
        const auto a = random_bits(rng, n, 1 + rng() % 60);
        const auto b = random_bits(rng, n, 1 + rng() % 60);
        std::size_t pop = 0;
        for (std::size_t i = 0; i < n; ++i) {
            pop += a.test(i);
        }
        REQUIRE(a.count() == pop);

        const std::size_t shift = rng() % (n + 3);
        std::size_t hits = 0;
        for (std::size_t i = 0; i + shift < n; ++i) {
            hits += a.test(i + shift) && b.test(i);
        }
        REQUIRE(a.count_shifted(b, shift) == hits);
        REQUIRE(a.intersects_shifted(b, shift) == (hits > 0));

        const auto d = a.and_shift_down(shift);
        REQUIRE(d.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(d.test(i) == (a.test(i) && i + shift < n && a.test(i + shift)));
        }

        const std::size_t lo = rng() % (n + 1);
        const std::size_t hi = lo + rng() % (n - lo + 1);
        std::size_t in_range = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            in_range += a.test(i);
        }
        REQUIRE(a.count_range(lo, hi) == in_range);

        bitvec r(n);
        r.set_range(lo, hi);
        REQUIRE(r.count() == hi - lo);
        REQUIRE((~r).count() == n - (hi - lo));

        const std::size_t from = rng() % (n + 1);
        std::size_t next = bitvec::npos;
        for (std::size_t i = from; i < n; ++i) {
            if (a.test(i)) {
                next = i;
                break;
            }
        }
        REQUIRE(a.find_next(from) == next);
    }
}

TEST_CASE("window reads past the end as zero")
{
    bitvec b(70);
    b.set(69);
    b.set(3);
    CHECK(b.window(3) == 1);
    CHECK(b.window(69) == 1);
    CHECK(b.window(65) == (std::uint64_t{1} << 4));
}
