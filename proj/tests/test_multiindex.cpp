#include <set>

#include "doctest.h"
#include "nkt/errors.hpp"
#include "nkt/multiindex.hpp"

using nkt::MultiIndex;

TEST_SUITE("multiindex") {

TEST_CASE("construction sorts entries") {
    MultiIndex m{1, 0, 1};
    CHECK(m.order() == 3);
    CHECK(m.entries() == std::vector<int>{0, 1, 1});
    CHECK(m.count(1) == 2);
    CHECK(m.max_entry() == 1);
    CHECK(MultiIndex{}.max_entry() == -1);
    CHECK(nkt::to_string(m) == "[0,1,1]");
}

TEST_CASE("mi_add") {
    CHECK(nkt::mi_add({}, {0}, 1) == MultiIndex{0});
    CHECK(nkt::mi_add({0}, {0}, 1) == MultiIndex{0, 0});
    auto xxy = nkt::mi_add({0, 1}, {0}, 2);
    CHECK(xxy == MultiIndex{0, 0, 1});
    CHECK(xxy.order() == 3);
    CHECK_THROWS_AS(nkt::mi_add({0}, {2}, 2), nkt::DomainError);
}

TEST_CASE("mi_subtract inverts mi_add") {
    MultiIndex a{0, 1, 1}, b{1};
    CHECK(nkt::mi_subtract(nkt::mi_add(a, b, 2), b) == a);
}

TEST_CASE("ordering is by order first") {
    CHECK(MultiIndex{} < MultiIndex{1});
    CHECK(MultiIndex{1} < MultiIndex{0, 0});
    CHECK(MultiIndex{0, 1} < MultiIndex{1, 1});
}

TEST_CASE("mi_enumerate small cases") {
    auto a = nkt::mi_enumerate(1, 2);
    CHECK(a == std::vector<MultiIndex>{{}, {0}, {0, 0}});
    auto b = nkt::mi_enumerate(2, 1);
    CHECK(b == std::vector<MultiIndex>{{}, {0}, {1}});
    CHECK(nkt::mi_enumerate(2, 2).size() == 6);
}

TEST_CASE("mi_enumerate matches brute force over ordered tuples") {
    for (int n = 1; n <= 3; ++n) {
        for (int k = 0; k <= 4; ++k) {
            std::set<std::vector<int>> seen;
            std::vector<int> tuple;
            auto rec = [&](auto&& self, int depth) -> void {
                auto sorted = tuple;
                std::sort(sorted.begin(), sorted.end());
                seen.insert(sorted);
                if (depth == k) return;
                for (int d = 0; d < n; ++d) {
                    tuple.push_back(d);
                    self(self, depth + 1);
                    tuple.pop_back();
                }
            };
            rec(rec, 0);
            auto got = nkt::mi_enumerate(n, k);
            CHECK(got.size() == seen.size());
            CHECK(std::is_sorted(got.begin(), got.end()));
            for (const auto& m : got) CHECK(seen.contains(m.entries()));
        }
    }
}

TEST_CASE("binom") {
    CHECK(nkt::binom(1, 2) == 2);
    CHECK(nkt::binom(0, 5) == 1);
    CHECK(nkt::binom(2, 4) == 6);
    CHECK(nkt::binom(5, 5) == 1);
    CHECK_THROWS_AS(nkt::binom(3, 2), nkt::DomainError);
    // Pascal's rule as an independent check.
    for (unsigned b = 1; b < 30; ++b) {
        for (unsigned a = 1; a < b; ++a) CHECK(nkt::binom(a, b) == nkt::binom(a - 1, b - 1) + nkt::binom(a, b - 1));
    }
}

TEST_CASE("submultiset multiplicities count ordered splittings") {
    MultiIndex xi{0, 0, 1};
    std::uint64_t total = 0;
    int visits = 0;
    nkt::for_each_submultiset(xi, [&](const MultiIndex& s, const MultiIndex& r, std::uint64_t mult) {
        CHECK(nkt::mi_add(s, r, 2) == xi);
        total += mult;
        ++visits;
    });
    CHECK(visits == 6);    // (2+1)(1+1)
    CHECK(total == 8);     // 2^3 subsets of the three positions
}

TEST_CASE("jet order cap") {
    std::vector<int> too_long(nkt::kHardMaxJetOrder + 1, 0);
    CHECK_THROWS(MultiIndex(std::span<const int>(too_long)));
}

}
