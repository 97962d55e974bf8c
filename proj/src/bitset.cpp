#include <ergodiff/bitset.hpp>

#include <algorithm>
#include <bit>

namespace ergodiff
{

void bitvec::set_range(std::size_t lo, std::size_t hi) noexcept
{
    if (lo >= hi) {
        return;
    }
    std::size_t first = lo >> 6;
    const std::size_t last = (hi - 1) >> 6;
    const std::uint64_t head = ~std::uint64_t{0} << (lo & 63);
    const std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((hi - 1) & 63));
    if (first == last) {
        words_[first] |= head & tail;
        return;
    }
    words_[first] |= head;
    for (++first; first < last; ++first) {
        words_[first] = ~std::uint64_t{0};
    }
    words_[last] |= tail;
}

std::size_t bitvec::count() const noexcept
{
    std::size_t c = 0;
    for (auto w : words_) {
        c += static_cast<std::size_t>(std::popcount(w));
    }
    return c;
}

std::size_t bitvec::count_range(std::size_t lo, std::size_t hi) const noexcept
{
    hi = std::min(hi, nbits_);
    if (lo >= hi) {
        return 0;
    }
    std::size_t c = 0;
    std::size_t pos = lo;
    while (pos + 64 <= hi) {
        c += static_cast<std::size_t>(std::popcount(window(pos)));
        pos += 64;
    }
    if (pos < hi) {
        const auto rest = hi - pos;
        c += static_cast<std::size_t>(std::popcount(window(pos) & (~std::uint64_t{0} >> (64 - rest))));
    }
    return c;
}

bool bitvec::any() const noexcept
{
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t bitvec::find_next(std::size_t from) const noexcept
{
    if (from >= nbits_) {
        return npos;
    }
    std::size_t wi = from >> 6;
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from & 63));
    while (true) {
        if (w != 0) {
            const auto pos = (wi << 6) + static_cast<std::size_t>(std::countr_zero(w));
            return pos < nbits_ ? pos : npos;
        }
        if (++wi >= words_.size()) {
            return npos;
        }
        w = words_[wi];
    }
}

std::uint64_t bitvec::window(std::size_t pos) const noexcept
{
    const std::size_t wi = pos >> 6;
    const unsigned off = pos & 63;
    if (wi >= words_.size()) {
        return 0;
    }
    std::uint64_t w = words_[wi] >> off;
    if (off != 0 && wi + 1 < words_.size()) {
        w |= words_[wi + 1] << (64 - off);
    }
    return w;
}

bool bitvec::intersects_shifted(const bitvec &other, std::size_t shift) const noexcept
{
    if (shift >= nbits_) {
        return false;
    }
    const std::size_t len = std::min(nbits_ - shift, other.nbits_);
    for (std::size_t i = 0; i < len; i += 64) {
        std::uint64_t w = window(shift + i) & other.window(i);
        if (len - i < 64) {
            w &= ~std::uint64_t{0} >> (64 - (len - i));
        }
        if (w != 0) {
            return true;
        }
    }
    return false;
}

std::size_t bitvec::count_shifted(const bitvec &other, std::size_t shift) const noexcept
{
    if (shift >= nbits_) {
        return 0;
    }
    const std::size_t len = std::min(nbits_ - shift, other.nbits_);
    std::size_t c = 0;
    for (std::size_t i = 0; i < len; i += 64) {
        std::uint64_t w = window(shift + i) & other.window(i);
        if (len - i < 64) {
            w &= ~std::uint64_t{0} >> (64 - (len - i));
        }
        c += static_cast<std::size_t>(std::popcount(w));
    }
    return c;
}

bitvec bitvec::and_shift_down(std::size_t shift) const
{
    bitvec out(nbits_);
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
        out.words_[wi] = words_[wi] & window((wi << 6) + shift);
    }
    out.clear_tail();
    return out;
}

bitvec &bitvec::operator&=(const bitvec &other) noexcept
{
    for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) {
        words_[i] &= other.words_[i];
    }
    return *this;
}

bitvec &bitvec::operator|=(const bitvec &other) noexcept
{
    for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) {
        words_[i] |= other.words_[i];
    }
    clear_tail();
    return *this;
}

bitvec bitvec::operator~() const
{
    bitvec out(*this);
    for (auto &w : out.words_) {
        w = ~w;
    }
    out.clear_tail();
    return out;
}

void bitvec::clear_tail() noexcept
{
    if (nbits_ % 64 != 0 && !words_.empty()) {
        words_.back() &= ~std::uint64_t{0} >> (64 - nbits_ % 64);
    }
}

} // namespace ergodiff
