#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nkt/derivations.hpp"
#include "nkt/koszul_tate.hpp"
#include "nkt/noether.hpp"

namespace nkt {

/// Finite closed range lo..hi, optionally named (`r=1..3`).
struct IndexRange {
    std::string name;
    int lo = 0;
    int hi = 0;

    int size() const { return hi - lo + 1; }
    bool contains(int v) const { return v >= lo && v <= hi; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct VariableDecl {
    std::string name;
    VarKind kind = VarKind::Field;  ///< Field, Ghost or StageGhost
    int stage = -1;
    Parity parity = Parity::Even;
    std::vector<IndexRange> ranges;

    /// Interned id for one component; throws DomainError when out of range.
    VariableId id(const std::vector<int>& components) const;
    /// Every component, row-major.
    std::vector<VariableId> all() const;
    friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

/// Rational table over a box of index ranges, stored row-major.
struct ConstantTensor {
    std::vector<IndexRange> dims;
    bool antisymmetric = false;  ///< required antisymmetry in the last two indices
    std::vector<Rational> values;

    std::size_t volume() const;
    /// nullopt when an index is out of range.
    std::optional<Rational> at(std::span<const int> index) const;
    friend bool operator==(const ConstantTensor&, const ConstantTensor&) = default;
};

struct Theory {
    std::string name;
    int dim = 1;
    std::vector<std::string> coords;
    std::vector<VariableDecl> variables;
    std::vector<std::pair<std::string, ConstantTensor>> constants;
    GradedPolynomial lagrangian;
    std::map<std::string, LinearJetOperator> operators;
    std::map<std::string, GeneralizedVectorField> derivations;
    std::map<std::string, ReductionCertificate> certificates;

    RenderOptions render_options() const { return {coords}; }
    const VariableDecl* find_variable(std::string_view name) const;
    const ConstantTensor* find_constant(std::string_view name) const;

    friend bool operator==(const Theory&, const Theory&) = default;
};

/// Default coordinate names for a base dimension.
std::vector<std::string> default_coordinates(int dim);

}  // namespace nkt
