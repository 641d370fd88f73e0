#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gqw {

/// Fixed-universe bitset over the global edge indices of a partition set.
class EdgeSet {
public:
    EdgeSet() = default;
    explicit EdgeSet(std::size_t universe) : bits_(universe), words_((universe + 63) / 64, 0) {}

    std::size_t universe() const noexcept { return bits_; }

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    /// |this ∩ other|
    std::size_t count_and(const EdgeSet& other) const noexcept {
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        return n;
    }

    /// |this \ other|
    std::size_t count_minus(const EdgeSet& other) const noexcept {
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) n += static_cast<std::size_t>(std::popcount(words_[i] & ~other.words_[i]));
        return n;
    }

    EdgeSet& operator|=(const EdgeSet& other) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t word = words_[w];
            while (word) {
                const int bit = std::countr_zero(word);
                f(w * 64 + static_cast<std::size_t>(bit));
                word &= word - 1;
            }
        }
    }

    bool operator==(const EdgeSet&) const = default;

private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace gqw
