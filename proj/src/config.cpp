#include "nkt/config.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "nkt/errors.hpp"

namespace nkt {

namespace {

int initial_order() {
    const char* env = std::getenv("NKT_MAX_JET_ORDER");
    if (env == nullptr || *env == '\0') return kDefaultMaxJetOrder;
    return parse_jet_order(env);
}

std::atomic<int>& order_cell() {
    static std::atomic<int> cell{initial_order()};
    return cell;
}

}  // namespace

int parse_jet_order(const char* text) {
    std::string s(text);
    if (s.empty() || s.size() > 3) throw DomainError("invalid jet order cap '" + s + "'");
    int value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw DomainError("invalid jet order cap '" + s + "'");
        value = value * 10 + (c - '0');
    }
    if (value > kHardMaxJetOrder) {
        throw DomainError("jet order cap " + s + " exceeds hard limit " + std::to_string(kHardMaxJetOrder));
    }
    return value;
}

int max_jet_order() { return order_cell().load(std::memory_order_relaxed); }

void set_max_jet_order(int order) {
    if (order < 0 || order > kHardMaxJetOrder) {
        throw DomainError("jet order cap " + std::to_string(order) + " outside [0, " +
                          std::to_string(kHardMaxJetOrder) + "]");
    }
    order_cell().store(order, std::memory_order_relaxed);
}

ScopedMaxJetOrder::ScopedMaxJetOrder(int order) : previous_(max_jet_order()) { set_max_jet_order(order); }

ScopedMaxJetOrder::~ScopedMaxJetOrder() { order_cell().store(previous_, std::memory_order_relaxed); }

}  // namespace nkt
