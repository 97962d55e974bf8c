#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ergodiff
{

// Fixed-length bit vector with the word-level kernels used for set
// correlation: shifted intersection tests and counts without materializing
// the shifted copy.
class bitvec
{
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    bitvec() = default;
    explicit bitvec(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const noexcept
    {
        return nbits_;
    }
    bool test(std::size_t i) const noexcept
    {
        return (words_[i >> 6] >> (i & 63)) & 1U;
    }
    void set(std::size_t i, bool value = true) noexcept
    {
        const auto mask = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    // Sets bits [lo, hi).
    void set_range(std::size_t lo, std::size_t hi) noexcept;

    std::size_t count() const noexcept;
    // Count of set bits in [lo, hi).
    std::size_t count_range(std::size_t lo, std::size_t hi) const noexcept;
    bool any() const noexcept;
    std::size_t find_next(std::size_t from) const noexcept;

    // 64 bits starting at bit position pos (bits past the end read as zero).
    std::uint64_t window(std::size_t pos) const noexcept;

    // Whether some i has this[i + shift] and other[i].
    bool intersects_shifted(const bitvec &other, std::size_t shift) const noexcept;
    // Number of i with this[i + shift] and other[i].
    std::size_t count_shifted(const bitvec &other, std::size_t shift) const noexcept;
    // Bit i of the result is this[i] and this[i + shift] (length unchanged).
    bitvec and_shift_down(std::size_t shift) const;

    bitvec &operator&=(const bitvec &other) noexcept;
    bitvec &operator|=(const bitvec &other) noexcept;
    bitvec operator~() const;
    bool operator==(const bitvec &other) const = default;

    std::span<const std::uint64_t> words() const noexcept
    {
        return words_;
    }

private:
    void clear_tail() noexcept;

    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace ergodiff
