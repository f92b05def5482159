#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "nkt/config.hpp"

namespace nkt {

/// Symmetric multi-index over base directions, stored as a sorted multiset.
///
/// Storage is inline (no allocation); the order is bounded by kHardMaxJetOrder.
/// Ordering is by order first, then entries lexicographically.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> entries);
    explicit MultiIndex(std::span<const int> entries);

    static MultiIndex single(int direction) { return MultiIndex{direction}; }

    int order() const { return size_; }
    bool empty() const { return size_ == 0; }
    int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    std::vector<int> entries() const;

    /// Number of occurrences of a base direction.
    int count(int direction) const;
    /// Largest entry, or -1 when empty.
    int max_entry() const { return size_ == 0 ? -1 : entries_[size_ - 1u]; }

    /// Multiset union with one more direction (no dimension check).
    MultiIndex plus(int direction) const;

    friend bool operator==(const MultiIndex& a, const MultiIndex& b);
    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);

private:
    std::array<std::uint8_t, kHardMaxJetOrder> entries_{};
    std::uint8_t size_ = 0;
};

/// Multiset union; throws DomainError if an entry is >= n.
MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b, int n);

/// Multiset difference a - b; b must be a sub-multiset of a.
MultiIndex mi_subtract(const MultiIndex& a, const MultiIndex& b);

/// All multisets over {0..n-1} of size <= k: by order, then lexicographically.
std::vector<MultiIndex> mi_enumerate(int n, int k);

/// Exact binomial coefficient "b choose a" (C^a_b); throws DomainError if a > b.
std::uint64_t binom(unsigned a, unsigned b);

/// Visits every sub-multiset sigma of xi together with the number of ways to
/// split xi into (sigma, xi - sigma): prod_j C(xi_j, sigma_j).
void for_each_submultiset(const MultiIndex& xi,
                          const std::function<void(const MultiIndex& sigma, const MultiIndex& rest,
                                                   std::uint64_t multiplicity)>& visit);

/// `[0,0,1]`
std::string to_string(const MultiIndex& m);

}  // namespace nkt
