#pragma once

#include <map>
#include <optional>
#include <vector>

#include "nkt/graded_poly.hpp"

namespace nkt {

/// Total derivative d_lambda: an even derivation raising every jet index by lambda and
/// differentiating explicit base-coordinate dependence.
GradedPolynomial total_derivative(const GradedPolynomial& p, int direction);

/// d_Lambda = d_{lambda_k} o ... o d_{lambda_1}.
GradedPolynomial total_derivative_multi(const GradedPolynomial& p, const MultiIndex& lambda);

/// Left graded partial derivative: moving past odd factors on the left costs a sign.
GradedPolynomial partial_left(const GradedPolynomial& p, const JetVariable& v);

/// Right graded partial derivative: signs are counted from the right.
GradedPolynomial partial_right(const GradedPolynomial& p, const JetVariable& v);

/// Variational derivatives E_A keyed by the base variable A.
using VariationalDerivatives = std::map<VariableId, GradedPolynomial>;

/// E_A = sum_Lambda (-1)^|Lambda| d_Lambda(partial_left(L, A_Lambda)), Lambda ranging over the
/// multi-indices of A that actually occur in L. Throws ParityError for a non-even L.
VariationalDerivatives euler_lagrange(const GradedPolynomial& lagrangian, std::span<const VariableId> vars);

/// Single component E_A; no parity requirement on the density.
GradedPolynomial euler_lagrange_component(const GradedPolynomial& density, VariableId var);

/// Every non-coordinate base variable occurring in p, in canonical order.
std::vector<VariableId> variables_of(const GradedPolynomial& p);

struct TrivialityResult {
    bool trivial = false;
    /// Nonzero variational derivatives (empty when trivial).
    VariationalDerivatives residual;
    /// The density has no field dependence at all (a pullback of a form on the base).
    bool field_independent = false;
};

/// Whether a homogeneous density is variationally trivial, i.e. every E_A vanishes. Under
/// the contractible-base assumption this is the test for d_H-exactness up to a pullback form.
TrivialityResult is_variationally_trivial(const GradedPolynomial& density);

}  // namespace nkt
