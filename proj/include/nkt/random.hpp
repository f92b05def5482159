#pragma once

#include <optional>
#include <random>
#include <vector>

#include "nkt/graded_poly.hpp"
#include "nkt/noether.hpp"
#include "nkt/theory.hpp"

namespace nkt::random {

using Engine = std::mt19937_64;

struct PolySpec {
    std::vector<VariableId> vars;  ///< pool of base variables (any parity)
    int dim = 1;                   ///< base dimension for jet indices and coordinates
    int max_jet_order = 2;
    int max_degree = 2;  ///< factors per monomial
    int max_terms = 4;
    int coeff_range = 3;  ///< numerators in [-range, range], denominators in [1, 3]
    bool coordinates = false;
    /// Keep only monomials of this parity (the result may be zero).
    std::optional<Parity> parity;
};

MultiIndex multiindex(Engine& rng, int dim, int max_order);
Rational rational(Engine& rng, int range);
GradedPolynomial polynomial(Engine& rng, const PolySpec& spec);

struct OperatorSpec {
    std::vector<VariableId> params;
    std::vector<VariableId> targets;
    int max_order = 2;
    int max_entries = 6;
    PolySpec coefficients;
};

LinearJetOperator linear_operator(Engine& rng, OperatorRole role, const OperatorSpec& spec);

/// Vector field whose components make it a derivation of the given parity.
GeneralizedVectorField vector_field(Engine& rng, const std::vector<VariableId>& targets, Parity parity,
                                    const PolySpec& components);

int uniform(Engine& rng, int lo, int hi);

/// Small but fully populated theory (fields, ghosts, a stage ghost, constants, even
/// Lagrangian, operators, derivations, certificates) for round-trip testing.
Theory theory(Engine& rng);

}  // namespace nkt::random
