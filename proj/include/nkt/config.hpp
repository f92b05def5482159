#pragma once

namespace nkt {

/// Storage limit of a multi-index; the configurable cap may not exceed it.
inline constexpr int kHardMaxJetOrder = 32;
inline constexpr int kDefaultMaxJetOrder = 8;

/// Current cap on jet orders. Initialized from NKT_MAX_JET_ORDER on first use.
int max_jet_order();

/// Throws DomainError unless 0 <= order <= kHardMaxJetOrder.
void set_max_jet_order(int order);

/// Parses an NKT_MAX_JET_ORDER style value; throws DomainError on junk.
int parse_jet_order(const char* text);

/// RAII override, mostly for tests.
class ScopedMaxJetOrder {
public:
    explicit ScopedMaxJetOrder(int order);
    ~ScopedMaxJetOrder();
    ScopedMaxJetOrder(const ScopedMaxJetOrder&) = delete;
    ScopedMaxJetOrder& operator=(const ScopedMaxJetOrder&) = delete;

private:
    int previous_;
};

}  // namespace nkt
