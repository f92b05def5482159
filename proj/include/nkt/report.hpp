#pragma once

#include <string>
#include <vector>

#include "nkt/errors.hpp"
#include "nkt/graded_poly.hpp"

namespace nkt {

struct ResidualEntry {
    std::string where;
    GradedPolynomial expr;
};

struct CertificateStatus {
    std::string label;
    bool verified = false;
};

/// Outcome of a check. `pass` holds iff every residual is zero and every listed
/// certificate verified; `notes` carry explanations that have no residual form.
struct VerificationReport {
    std::string check;
    std::string theory;
    std::string target;
    bool pass = false;
    std::vector<ResidualEntry> residuals;
    std::vector<std::string> assumptions;
    std::vector<CertificateStatus> certificates;
    std::vector<std::string> notes;
    double elapsed_ms = 0.0;

    /// Recomputes `pass` from residuals and certificates (and an extra condition).
    void settle(bool extra_condition = true);
    bool all_residuals_zero() const;
};

/// Thrown when an operation's verified precondition fails; carries the failing report.
struct PreconditionFailed : Error {
    PreconditionFailed(const std::string& what, VerificationReport r) : Error(what), report(std::move(r)) {}
    VerificationReport report;
};

}  // namespace nkt
