#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "nkt/noether.hpp"

namespace nkt {

/// Witness for a weakly vanishing expression R:
///   R = sum_{A,Sigma} M^{A,Sigma} d_Sigma E_A + kt(W).
struct ReductionCertificate {
    std::map<std::pair<VariableId, MultiIndex>, GradedPolynomial> coefficients;
    std::optional<GradedPolynomial> kt_witness;

    friend bool operator==(const ReductionCertificate&, const ReductionCertificate&) = default;
};

/// Lagrangian with its variational derivatives, the Noether operator Delta (antighost
/// sector) and the stage operators Delta_(k) of a reducibility chain.
class AntifieldContext {
public:
    explicit AntifieldContext(GradedPolynomial lagrangian);

    const GradedPolynomial& lagrangian() const { return lagrangian_; }
    /// E_A; zero for variables the Lagrangian does not depend on.
    GradedPolynomial euler_lagrange(VariableId field) const;

    void set_noether(LinearJetOperator delta);
    const std::optional<LinearJetOperator>& noether() const { return noether_; }

    /// Registers Delta_(k): params are stage-k ghosts, targets stage-(k-1) ghosts (ghosts for k = 0).
    void set_stage(int k, LinearJetOperator op);
    const std::map<int, LinearJetOperator>& stages() const { return stages_; }

private:
    GradedPolynomial lagrangian_;
    VariationalDerivatives el_;
    std::optional<LinearJetOperator> noether_;
    std::map<int, LinearJetOperator> stages_;
};

/// Koszul–Tate differential: right derivation with anti(A)_Lambda -> d_Lambda E_A.
GradedPolynomial kt_apply(const GradedPolynomial& p, const AntifieldContext& ctx);

/// Antighost extension: additionally anti(c^r)_Lambda -> d_Lambda Delta_r.
GradedPolynomial kt_extended_apply(const GradedPolynomial& p, const AntifieldContext& ctx,
                                   const LinearJetOperator& delta);
/// Uses the context's Noether operator; UndeclaredError if none is set.
GradedPolynomial kt_extended_apply(const GradedPolynomial& p, const AntifieldContext& ctx);

/// N-stage differential: additionally stage-k antighosts -> d_Lambda Delta_{r_k}.
/// Throws UndeclaredError for a stage antighost whose stage operator is missing.
GradedPolynomial kt_stage_apply(const GradedPolynomial& p, const AntifieldContext& ctx);

/// kt_extended(kt_extended(anti(c^r))) per ghost r; all zero iff the extension is nilpotent.
VerificationReport check_extended_nilpotent(const AntifieldContext& ctx);

/// residual - sum M^{A,Sigma} d_Sigma E_A - kt(W) must vanish exactly.
/// Throws CertificateError for witness indices that are not fields.
VerificationReport check_weakly_zero(const GradedPolynomial& residual, const ReductionCertificate& cert,
                                     const AntifieldContext& ctx, const std::string& label = "certificate");

/// Stage-k composition sum_{r_k} c^{r_k} kt_stage(Delta_{r_k}).
GradedPolynomial stage_composition(const AntifieldContext& ctx, int k);

/// Verifies the Noether identity, the shape of every Delta_(k), and each stage composition
/// against certificate "stage<k>". Throws CertificateError when a certificate is missing.
VerificationReport check_reducibility_chain(const AntifieldContext& ctx,
                                            const std::map<std::string, ReductionCertificate>& certificates);

/// Certificate label used for stage k.
std::string stage_label(int k);

}  // namespace nkt
