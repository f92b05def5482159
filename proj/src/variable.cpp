#include "nkt/variable.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <tuple>

#include "nkt/errors.hpp"

namespace nkt {

const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

const char* to_string(VarKind k) {
    switch (k) {
        case VarKind::Coordinate: return "coordinate";
        case VarKind::Field: return "field";
        case VarKind::Ghost: return "ghost";
        case VarKind::StageGhost: return "stage-ghost";
        case VarKind::Antifield: return "antifield";
        case VarKind::Antighost: return "antighost";
        case VarKind::StageAntighost: return "stage-antighost";
    }
    return "?";
}

namespace {

auto key_of(const VariableInfo& i) {
    return std::tie(i.kind, i.stage, i.name, i.components, i.parity);
}

struct InfoLess {
    bool operator()(const VariableInfo& a, const VariableInfo& b) const { return key_of(a) < key_of(b); }
};

// Interned declarations live for the whole process; handles are raw pointers into the deque.
struct Pool {
    std::mutex mutex;
    std::deque<VariableInfo> storage;
    std::map<VariableInfo, const VariableInfo*, InfoLess> index;
};

Pool& pool() {
    static Pool p;
    return p;
}

}  // namespace

VariableId VariableId::intern(VariableInfo info) {
    Pool& p = pool();
    std::lock_guard lock(p.mutex);
    if (auto it = p.index.find(info); it != p.index.end()) return VariableId(it->second);
    p.storage.push_back(info);
    const VariableInfo* ptr = &p.storage.back();
    p.index.emplace(std::move(info), ptr);
    return VariableId(ptr);
}

VariableId VariableId::field(std::string name, std::vector<int> components, Parity parity) {
    return intern({VarKind::Field, -1, std::move(name), std::move(components), parity});
}

VariableId VariableId::ghost(std::string name, std::vector<int> components, Parity parity) {
    return intern({VarKind::Ghost, -1, std::move(name), std::move(components), parity});
}

VariableId VariableId::stage_ghost(int stage, std::string name, std::vector<int> components) {
    if (stage < 0) throw DomainError("stage ghosts need stage >= 0");
    Parity parity = (stage % 2 == 0) ? Parity::Even : Parity::Odd;
    return intern({VarKind::StageGhost, stage, std::move(name), std::move(components), parity});
}

VariableId VariableId::coordinate(int direction) {
    return intern({VarKind::Coordinate, -1, "x" + std::to_string(direction), {direction}, Parity::Even});
}

std::strong_ordering operator<=>(VariableId a, VariableId b) {
    if (a.info_ == b.info_) return std::strong_ordering::equal;
    const VariableInfo& x = *a.info_;
    const VariableInfo& y = *b.info_;
    if (auto c = x.kind <=> y.kind; c != 0) return c;
    if (auto c = x.stage <=> y.stage; c != 0) return c;
    if (auto c = x.name.compare(y.name); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = x.components <=> y.components; c != 0) return c;
    return x.parity <=> y.parity;
}

VariableId anti_of(VariableId v) {
    VariableInfo info = v.info();
    switch (info.kind) {
        case VarKind::Field: info.kind = VarKind::Antifield; break;
        case VarKind::Ghost: info.kind = VarKind::Antighost; break;
        case VarKind::StageGhost: info.kind = VarKind::StageAntighost; break;
        default: throw DomainError(std::string("no antifield for a ") + to_string(info.kind));
    }
    info.parity = flip(info.parity);
    return VariableId::intern(std::move(info));
}

VariableId base_of(VariableId anti) {
    VariableInfo info = anti.info();
    switch (info.kind) {
        case VarKind::Antifield: info.kind = VarKind::Field; break;
        case VarKind::Antighost: info.kind = VarKind::Ghost; break;
        case VarKind::StageAntighost: info.kind = VarKind::StageGhost; break;
        default: throw DomainError(std::string("not an antifield: ") + to_string(info.kind));
    }
    info.parity = flip(info.parity);
    return VariableId::intern(std::move(info));
}

std::strong_ordering operator<=>(const JetVariable& a, const JetVariable& b) {
    if (auto c = a.var <=> b.var; c != 0) return c;
    return a.jet <=> b.jet;
}

JetVariable make_jet(VariableId var, MultiIndex jet) {
    if (var.is_coordinate() && !jet.empty()) throw DomainError("base coordinates carry no jet index");
    if (jet.order() > max_jet_order()) {
        throw OverflowError("jet order " + std::to_string(jet.order()) + " of " + var.name() +
                            " exceeds the cap " + std::to_string(max_jet_order()));
    }
    return {var, jet};
}

}  // namespace nkt
