#pragma once

#include <map>
#include <vector>

#include "nkt/derivations.hpp"
#include "nkt/graded_poly.hpp"
#include "nkt/jet_calculus.hpp"
#include "nkt/report.hpp"

namespace nkt {

/// Gauge: upsilon^A = sum coeff(r, A, Xi) d_Xi xi^r, maps parameters to fields.
/// Noether: Delta_r = sum coeff(r, A, Lambda) d_Lambda (antifield of A), maps the
/// density-dual of the fields to the density-dual of the parameters.
enum class OperatorRole { Gauge, Noether };
const char* to_string(OperatorRole r);
OperatorRole opposite(OperatorRole r);

struct OperatorKey {
    VariableId param;
    VariableId target;
    MultiIndex jet;

    friend bool operator==(const OperatorKey&, const OperatorKey&) = default;
    friend std::strong_ordering operator<=>(const OperatorKey& a, const OperatorKey& b);
};

/// Coefficient family {C^{A,Lambda}_r} of a linear differential operator, stored per distinct
/// multi-index (never per ordered tuple).
class LinearJetOperator {
public:
    LinearJetOperator() = default;
    LinearJetOperator(OperatorRole role, std::vector<VariableId> params, std::vector<VariableId> targets);

    OperatorRole role() const { return role_; }
    void set_role(OperatorRole r) { role_ = r; }
    const std::vector<VariableId>& params() const { return params_; }
    const std::vector<VariableId>& targets() const { return targets_; }
    const std::map<OperatorKey, GradedPolynomial>& coeffs() const { return coeffs_; }

    /// Accumulates a coefficient; extends the declared spaces when needed.
    void add(VariableId param, VariableId target, const MultiIndex& jet, const GradedPolynomial& c);
    GradedPolynomial coeff(VariableId param, VariableId target, const MultiIndex& jet) const;
    void declare_param(VariableId v);
    void declare_target(VariableId v);

    int max_order() const;
    bool is_zero() const { return coeffs_.empty(); }

    /// Variables an operator input/output is indexed by, per role.
    const std::vector<VariableId>& inputs() const { return role_ == OperatorRole::Gauge ? params_ : targets_; }
    const std::vector<VariableId>& outputs() const { return role_ == OperatorRole::Gauge ? targets_ : params_; }

    friend bool operator==(const LinearJetOperator&, const LinearJetOperator&) = default;

private:
    OperatorRole role_ = OperatorRole::Gauge;
    std::vector<VariableId> params_;
    std::vector<VariableId> targets_;
    std::map<OperatorKey, GradedPolynomial> coeffs_;
};

/// Throws DomainError if any coefficient mentions a ghost, antifield, or antighost.
void validate_coefficients(const LinearJetOperator& op);

/// Intertwining operator: eta(op)^{A,Lambda}_r =
///   sum_Sigma (-1)^{|Sigma+Lambda|} m(Sigma, Lambda) d_Sigma op^{A,Sigma+Lambda}_r,
/// where m = prod_j C(Sigma_j + Lambda_j, Sigma_j) is the number of ways to split the
/// multiset Sigma+Lambda (it reduces to C^{|Sigma|}_{|Sigma+Lambda|} in one dimension).
/// The role flips.
LinearJetOperator eta(const LinearJetOperator& op);

/// outer o inner; both operators need the same role, inner's outputs must equal outer's inputs.
LinearJetOperator compose(const LinearJetOperator& outer, const LinearJetOperator& inner);

/// Identity on a space of variables.
LinearJetOperator identity_operator(OperatorRole role, const std::vector<VariableId>& space);

/// out_o = sum K^{o,Lambda}_i d_Lambda(in_i), with coefficient to the left.
std::map<VariableId, GradedPolynomial> apply_operator(const LinearJetOperator& op,
                                                      const std::map<VariableId, GradedPolynomial>& inputs);

/// Gauge operator as the vector field sum_{r,Xi} xi^r_Xi coeff(r, A, Xi) d/ds^A.
GeneralizedVectorField to_vector_field(const LinearJetOperator& gauge);

/// Delta_r = sum_{A,Lambda} Delta^{A,Lambda}_r anti(A)_Lambda.
GradedPolynomial noether_component(const LinearJetOperator& noether, VariableId param);

/// c^r Delta_r summed over parameters: the graded density of the Noether operator.
GradedPolynomial noether_density(const LinearJetOperator& noether);

/// sum_{A,Lambda} Delta^{A,Lambda}_r d_Lambda E_A per parameter r.
std::map<VariableId, GradedPolynomial> noether_residuals(const LinearJetOperator& noether,
                                                         const GradedPolynomial& lagrangian);

VerificationReport check_noether_identity(const LinearJetOperator& noether, const GradedPolynomial& lagrangian);

/// Gauge-role operator only. Wraps check_variational on to_vector_field(op).
VerificationReport check_variational(const LinearJetOperator& gauge, const GradedPolynomial& lagrangian);

struct DerivedOperator {
    LinearJetOperator op;
    VerificationReport report;
};

/// Noether's second theorem: Delta = eta(upsilon) with its Noether identity verified.
/// Throws PreconditionFailed when upsilon is not a variational symmetry.
DerivedOperator derive_noether_from_gauge(const LinearJetOperator& gauge, const GradedPolynomial& lagrangian);

/// Converse: upsilon = eta(Delta), verified variational, plus eta(eta(Delta)) == Delta.
/// Throws PreconditionFailed when Delta's Noether identity fails.
DerivedOperator derive_gauge_from_noether(const LinearJetOperator& noether, const GradedPolynomial& lagrangian);

struct TrivialTableKey {
    VariableId param;
    VariableId i;
    VariableId j;
    MultiIndex lambda;
    MultiIndex sigma;

    friend bool operator==(const TrivialTableKey&, const TrivialTableKey&) = default;
    friend std::strong_ordering operator<=>(const TrivialTableKey& a, const TrivialTableKey& b);
};

/// T^{i,j,Lambda,Sigma}_r with T^{j,i,Lambda,Sigma}_r = -T^{i,j,Sigma,Lambda}_r.
using TrivialTable = std::map<TrivialTableKey, GradedPolynomial>;

/// upsilon = eta(M), M^{i,Lambda}_r = sum_{j,Sigma} T^{i,j,Lambda,Sigma}_r d_Sigma E_j.
/// Throws DomainError if T is not antisymmetric.
LinearJetOperator trivial_gauge_symmetry(const TrivialTable& table, const GradedPolynomial& lagrangian);

}  // namespace nkt
