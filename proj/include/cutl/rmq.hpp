#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace cutl {

// Range-minimum over a fixed int array with O(1) queries and linear memory:
// 64-bit suffix-minimum masks inside windows plus a sparse table over blocks.
class LinearRmq {
public:
    LinearRmq() = default;
    explicit LinearRmq(std::vector<std::int32_t> keys) { build(std::move(keys)); }

    void build(std::vector<std::int32_t> keys) {
        key_ = std::move(keys);
        const std::size_t n = key_.size();
        mask_.assign(n, 0);
        std::vector<std::uint32_t> stack;
        std::uint64_t cur = 0;
        for (std::size_t i = 0; i < n; ++i) {
            cur <<= 1;
            while (!stack.empty() && key_[stack.back()] > key_[i]) {
                std::size_t off = i - stack.back();
                if (off < 64) cur &= ~(std::uint64_t{1} << off);
                stack.pop_back();
            }
            stack.push_back(static_cast<std::uint32_t>(i));
            cur |= 1;
            mask_[i] = cur;
        }
        const std::size_t blocks = (n + 63) / 64;
        levels_ = 1;
        while ((std::size_t{1} << levels_) <= blocks) ++levels_;
        table_.assign(levels_ * blocks, 0);
        for (std::size_t b = 0; b < blocks; ++b)
            table_[b] = small(b * 64, std::min(n, (b + 1) * 64) - 1);
        for (std::size_t j = 1; j < levels_; ++j)
            for (std::size_t b = 0; b + (std::size_t{1} << j) <= blocks; ++b) {
                auto x = table_[(j - 1) * blocks + b];
                auto y = table_[(j - 1) * blocks + b + (std::size_t{1} << (j - 1))];
                table_[j * blocks + b] = key_[y] < key_[x] ? y : x;
            }
        blocks_ = blocks;
    }

    // Index of a minimum in [l, r], l <= r.
    std::uint32_t argmin(std::size_t l, std::size_t r) const {
        if (r - l < 64) return small(l, r);
        std::size_t bl = l / 64 + 1, br = r / 64;
        std::uint32_t best = small(l, bl * 64 - 1);
        if (bl < br) {
            std::size_t j = std::bit_width(br - bl) - 1;
            auto x = table_[j * blocks_ + bl];
            auto y = table_[j * blocks_ + br - (std::size_t{1} << j)];
            if (key_[x] < key_[best]) best = x;
            if (key_[y] < key_[best]) best = y;
        }
        auto z = small(br * 64, r);
        if (key_[z] < key_[best]) best = z;
        return best;
    }

    std::int32_t key(std::size_t i) const { return key_[i]; }
    std::size_t size() const { return key_.size(); }
    const std::vector<std::int32_t>& keys() const { return key_; }

private:
    std::uint32_t small(std::size_t l, std::size_t r) const {
        std::size_t len = r - l + 1;
        std::uint64_t m = mask_[r] & (len >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << len) - 1));
        return static_cast<std::uint32_t>(r - (63 - std::countl_zero(m)));
    }

    std::vector<std::int32_t> key_;
    std::vector<std::uint64_t> mask_;
    std::vector<std::uint32_t> table_;
    std::size_t levels_ = 0, blocks_ = 0;
};

}  // namespace cutl
