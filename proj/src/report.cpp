#include "nkt/report.hpp"

#include <algorithm>

namespace nkt {

bool VerificationReport::all_residuals_zero() const {
    return std::all_of(residuals.begin(), residuals.end(), [](const ResidualEntry& r) { return r.expr.is_zero(); });
}

void VerificationReport::settle(bool extra_condition) {
    bool certs = std::all_of(certificates.begin(), certificates.end(),
                             [](const CertificateStatus& c) { return c.verified; });
    pass = extra_condition && certs && all_residuals_zero();
}

}  // namespace nkt
