#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "nkt/multiindex.hpp"

namespace nkt {

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

inline Parity operator+(Parity a, Parity b) {
    return static_cast<Parity>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
inline Parity flip(Parity p) { return p + Parity::Odd; }
inline bool is_odd(Parity p) { return p == Parity::Odd; }
const char* to_string(Parity p);

/// Kinds in canonical-order rank. Stage ghosts/antighosts are further ordered by stage.
enum class VarKind : std::uint8_t {
    Coordinate,
    Field,
    Ghost,
    StageGhost,
    Antifield,
    Antighost,
    StageAntighost,
};

const char* to_string(VarKind k);

struct VariableInfo {
    VarKind kind = VarKind::Field;
    int stage = -1;  ///< k for stage ghosts/antighosts, -1 otherwise
    std::string name;
    std::vector<int> components;
    Parity parity = Parity::Even;
};

/// Handle to an interned variable declaration. Equality is identity; ordering is the
/// canonical variable order (kind rank, stage, name, components, parity).
class VariableId {
public:
    static VariableId intern(VariableInfo info);
    static VariableId field(std::string name, std::vector<int> components = {}, Parity parity = Parity::Even);
    static VariableId ghost(std::string name, std::vector<int> components = {}, Parity parity = Parity::Odd);
    static VariableId stage_ghost(int stage, std::string name, std::vector<int> components = {});
    static VariableId coordinate(int direction);

    VarKind kind() const { return info_->kind; }
    int stage() const { return info_->stage; }
    const std::string& name() const { return info_->name; }
    const std::vector<int>& components() const { return info_->components; }
    Parity parity() const { return info_->parity; }
    const VariableInfo& info() const { return *info_; }

    bool is_coordinate() const { return kind() == VarKind::Coordinate; }
    bool is_anti() const {
        return kind() == VarKind::Antifield || kind() == VarKind::Antighost || kind() == VarKind::StageAntighost;
    }
    bool is_ghostlike() const {
        return kind() == VarKind::Ghost || kind() == VarKind::StageGhost;
    }

    friend bool operator==(VariableId a, VariableId b) { return a.info_ == b.info_; }
    friend std::strong_ordering operator<=>(VariableId a, VariableId b);

private:
    explicit VariableId(const VariableInfo* info) : info_(info) {}
    const VariableInfo* info_;
};

/// Antifield of a field, antighost of a ghost (any stage); parity flips.
VariableId anti_of(VariableId v);
/// Inverse of anti_of.
VariableId base_of(VariableId anti);

/// y^A_Lambda: a variable together with its jet multi-index.
struct JetVariable {
    VariableId var;
    MultiIndex jet;

    Parity parity() const { return var.parity(); }
    friend bool operator==(const JetVariable&, const JetVariable&) = default;
    friend std::strong_ordering operator<=>(const JetVariable& a, const JetVariable& b);
};

/// Builds a jet variable, enforcing the configured order cap (OverflowError).
JetVariable make_jet(VariableId var, MultiIndex jet = {});

}  // namespace nkt
