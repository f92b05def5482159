#include "nkt/multiindex.hpp"

#include <algorithm>

#include "nkt/errors.hpp"

namespace nkt {

namespace {

void check_size(std::size_t n) {
    if (n > static_cast<std::size_t>(kHardMaxJetOrder)) {
        throw OverflowError("multi-index order " + std::to_string(n) + " exceeds storage limit " +
                            std::to_string(kHardMaxJetOrder));
    }
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::span<const int>(entries.begin(), entries.size())) {}

MultiIndex::MultiIndex(std::span<const int> entries) {
    check_size(entries.size());
    for (int e : entries) {
        if (e < 0 || e > 255) throw DomainError("base direction " + std::to_string(e) + " out of range");
        entries_[size_++] = static_cast<std::uint8_t>(e);
    }
    std::sort(entries_.begin(), entries_.begin() + size_);
}

std::vector<int> MultiIndex::entries() const { return {entries_.begin(), entries_.begin() + size_}; }

int MultiIndex::count(int direction) const {
    return static_cast<int>(std::count(entries_.begin(), entries_.begin() + size_, direction));
}

MultiIndex MultiIndex::plus(int direction) const {
    if (direction < 0 || direction > 255) {
        throw DomainError("base direction " + std::to_string(direction) + " out of range");
    }
    check_size(size_ + 1u);
    MultiIndex out = *this;
    auto pos = std::upper_bound(out.entries_.begin(), out.entries_.begin() + out.size_,
                                static_cast<std::uint8_t>(direction));
    std::move_backward(pos, out.entries_.begin() + out.size_, out.entries_.begin() + out.size_ + 1);
    *pos = static_cast<std::uint8_t>(direction);
    ++out.size_;
    return out;
}

bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.size_ == b.size_ && std::equal(a.entries_.begin(), a.entries_.begin() + a.size_, b.entries_.begin());
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (a.size_ != b.size_) return a.size_ <=> b.size_;
    for (std::uint8_t i = 0; i < a.size_; ++i) {
        if (a.entries_[i] != b.entries_[i]) return a.entries_[i] <=> b.entries_[i];
    }
    return std::strong_ordering::equal;
}

MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b, int n) {
    if (a.max_entry() >= n || b.max_entry() >= n) {
        throw DomainError("multi-index entry outside base dimension " + std::to_string(n));
    }
    std::vector<int> merged = a.entries();
    for (int e : b.entries()) merged.push_back(e);
    return MultiIndex(std::span<const int>(merged));
}

MultiIndex mi_subtract(const MultiIndex& a, const MultiIndex& b) {
    std::vector<int> rest = a.entries();
    for (int e : b.entries()) {
        auto it = std::find(rest.begin(), rest.end(), e);
        if (it == rest.end()) throw DomainError(to_string(b) + " is not contained in " + to_string(a));
        rest.erase(it);
    }
    return MultiIndex(std::span<const int>(rest));
}

std::vector<MultiIndex> mi_enumerate(int n, int k) {
    if (n < 1 || k < 0) throw DomainError("mi_enumerate needs n >= 1 and k >= 0");
    check_size(static_cast<std::size_t>(k));
    std::vector<MultiIndex> out;
    std::vector<MultiIndex> layer{MultiIndex{}};
    out.push_back(MultiIndex{});
    for (int order = 1; order <= k; ++order) {
        std::vector<MultiIndex> next;
        for (const auto& m : layer) {
            // Extend with directions >= the current maximum to keep each multiset once.
            for (int d = std::max(0, m.max_entry()); d < n; ++d) next.push_back(m.plus(d));
        }
        std::sort(next.begin(), next.end());
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

std::uint64_t binom(unsigned a, unsigned b) {
    if (a > b) throw DomainError("binom: " + std::to_string(a) + " > " + std::to_string(b));
    a = std::min(a, b - a);
    std::uint64_t result = 1;
    for (unsigned i = 1; i <= a; ++i) {
        // result * (b - a + i) is divisible by i at every step.
        result = result * (b - a + i) / i;
    }
    return result;
}

void for_each_submultiset(const MultiIndex& xi,
                          const std::function<void(const MultiIndex&, const MultiIndex&, std::uint64_t)>& visit) {
    // Distinct directions with their multiplicities.
    std::vector<std::pair<int, int>> counts;
    for (int i = 0; i < xi.order(); ++i) {
        if (counts.empty() || counts.back().first != xi[i]) counts.emplace_back(xi[i], 0);
        ++counts.back().second;
    }
    std::vector<int> take(counts.size(), 0);
    while (true) {
        std::vector<int> sigma;
        std::vector<int> rest;
        std::uint64_t mult = 1;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            for (int t = 0; t < take[j]; ++t) sigma.push_back(counts[j].first);
            for (int t = take[j]; t < counts[j].second; ++t) rest.push_back(counts[j].first);
            mult *= binom(static_cast<unsigned>(take[j]), static_cast<unsigned>(counts[j].second));
        }
        visit(MultiIndex(std::span<const int>(sigma)), MultiIndex(std::span<const int>(rest)), mult);
        std::size_t j = 0;
        while (j < counts.size() && take[j] == counts[j].second) take[j++] = 0;
        if (j == counts.size()) break;
        ++take[j];
    }
}

std::string to_string(const MultiIndex& m) {
    std::string out = "[";
    for (int i = 0; i < m.order(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(m[i]);
    }
    out += ']';
    return out;
}

}  // namespace nkt
