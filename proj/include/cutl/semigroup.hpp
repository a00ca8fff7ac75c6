#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"

namespace cutl {

// Finite semigroup generated by a set of elements, with an adjoined identity.
// Id 0 is the identity; other ids follow breadth-first discovery order.
template <class T, class Hash = std::hash<T>>
class SemigroupTable {
public:
    using Op = std::function<T(const T&, const T&)>;
    static constexpr std::uint32_t kIdentity = 0;

    SemigroupTable() = default;

    std::size_t size() const { return elements_.size() + 1; }
    const T& element(std::uint32_t id) const {
        if (id == kIdentity || id >= size()) throw InvalidArgument("no stored element for this id");
        return elements_[id - 1];
    }
    const std::vector<std::uint32_t>& generators() const { return gens_; }
    std::size_t generator_index(std::uint32_t id) const {
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (gens_[i] == id) return i;
        throw InvalidArgument("not a generator");
    }

    std::uint32_t find(const T& e) const {
        auto it = index_.find(e);
        if (it == index_.end()) throw InvalidArgument("element outside the closure");
        return it->second;
    }
    bool contains(const T& e) const { return index_.count(e) != 0; }

    // e · generators()[g]
    std::uint32_t times_generator(std::uint32_t e, std::size_t g) const { return right_[g * size() + e]; }
    const std::uint32_t* generator_column(std::size_t g) const { return right_.data() + g * size(); }

    std::uint32_t product(std::uint32_t a, std::uint32_t b) const {
        if (a == kIdentity) return b;
        if (b == kIdentity) return a;
        return find(op_(element(a), element(b)));
    }

    static SemigroupTable close(const std::vector<T>& generators, Op op, std::size_t budget) {
        SemigroupTable t;
        t.op_ = op;
        auto intern = [&](const T& e) -> std::uint32_t {
            auto [it, fresh] = t.index_.emplace(e, static_cast<std::uint32_t>(t.elements_.size() + 1));
            if (fresh) {
                if (t.elements_.size() + 1 >= budget)
                    throw ClosureBudgetExceeded("closure exceeds " + std::to_string(budget) + " elements");
                t.elements_.push_back(e);
            }
            return it->second;
        };
        for (const T& g : generators) {
            std::uint32_t id = intern(g);
            if (std::find(t.gens_.begin(), t.gens_.end(), id) == t.gens_.end()) t.gens_.push_back(id);
        }
        std::vector<std::vector<std::uint32_t>> cols(t.gens_.size());
        for (std::size_t g = 0; g < t.gens_.size(); ++g) cols[g].push_back(t.gens_[g]);  // 1 · g
        for (std::size_t i = 0; i < t.elements_.size(); ++i)
            for (std::size_t g = 0; g < t.gens_.size(); ++g) {
                T prod = op(t.elements_[i], t.elements_[t.gens_[g] - 1]);
                cols[g].push_back(intern(prod));
            }
        t.right_.resize(t.gens_.size() * t.size());
        for (std::size_t g = 0; g < t.gens_.size(); ++g)
            std::copy(cols[g].begin(), cols[g].end(), t.right_.begin() + g * t.size());
        return t;
    }

    // Rebuild from stored elements and generator ids (used when loading).
    static SemigroupTable restore(std::vector<T> elements, std::vector<std::uint32_t> gens,
                                  std::vector<std::uint32_t> right, Op op) {
        SemigroupTable t;
        t.elements_ = std::move(elements);
        t.gens_ = std::move(gens);
        t.right_ = std::move(right);
        t.op_ = std::move(op);
        for (std::size_t i = 0; i < t.elements_.size(); ++i)
            t.index_.emplace(t.elements_[i], static_cast<std::uint32_t>(i + 1));
        return t;
    }
    const std::vector<T>& elements() const { return elements_; }
    const std::vector<std::uint32_t>& right_table() const { return right_; }

private:
    std::vector<T> elements_;
    std::unordered_map<T, std::uint32_t, Hash> index_;
    std::vector<std::uint32_t> gens_;
    std::vector<std::uint32_t> right_;  // [g * size + e] = e · gen_g
    Op op_;
};

template <class T, class Hash = std::hash<T>>
SemigroupTable<T, Hash> close_generators(const std::vector<T>& generators,
                                         typename SemigroupTable<T, Hash>::Op op,
                                         std::size_t budget = 2'000'000) {
    return SemigroupTable<T, Hash>::close(generators, std::move(op), budget);
}

}  // namespace cutl
