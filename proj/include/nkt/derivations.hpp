#pragma once

#include <map>
#include <optional>

#include "nkt/graded_poly.hpp"
#include "nkt/report.hpp"

namespace nkt {

/// Vertical generalized (graded) vector field upsilon = sum_A upsilon^A d/ds^A.
struct GeneralizedVectorField {
    std::map<VariableId, GradedPolynomial> components;

    const GradedPolynomial* component(VariableId v) const;
    friend bool operator==(const GeneralizedVectorField&, const GeneralizedVectorField&) = default;
};

/// Parity of the derivation, [upsilon^A] + [A] for every nonzero component. Returns nullopt for
/// the zero field; throws ParityError for mixed components or disagreeing components, and
/// DomainError for a component along a base coordinate.
std::optional<Parity> derivation_parity(const GeneralizedVectorField& v);

/// Prolongation theta(p) = sum_{A,Lambda} d_Lambda(upsilon^A) * partial_left(p, A_Lambda).
GradedPolynomial prolong_apply(const GeneralizedVectorField& v, const GradedPolynomial& p);

/// Lie derivative of a density along the prolongation (coefficient-wise).
GradedPolynomial lie_derivative_density(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian);

/// upsilon ⌋ δL = sum_A upsilon^A E_A.
GradedPolynomial contract_with_EL(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian);

/// Passes iff upsilon ⌋ δL is variationally trivial; residuals are its variational derivatives.
VerificationReport check_variational(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian);

struct NilpotencyReport {
    bool nilpotent = false;
    /// theta(upsilon^A) for every component, zero entries included.
    std::map<VariableId, GradedPolynomial> residuals;
};

/// theta(upsilon^A) = 0 for all A. Throws ParityError for an even derivation.
NilpotencyReport check_nilpotent(const GeneralizedVectorField& v);

/// R = L_theta L - upsilon ⌋ δL must be variationally trivial (first variational formula).
VerificationReport first_variational_residual(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian);

/// Shared wording for the contractible-base assumption.
extern const char* const kTrivialTopologyAssumption;

}  // namespace nkt
