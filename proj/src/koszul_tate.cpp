#include "nkt/koszul_tate.hpp"

#include <algorithm>

#include "nkt/errors.hpp"

namespace nkt {

AntifieldContext::AntifieldContext(GradedPolynomial lagrangian) : lagrangian_(std::move(lagrangian)) {
    auto vars = variables_of(lagrangian_);
    el_ = nkt::euler_lagrange(lagrangian_, vars);
}

GradedPolynomial AntifieldContext::euler_lagrange(VariableId field) const {
    auto it = el_.find(field);
    return it == el_.end() ? GradedPolynomial{} : it->second;
}

void AntifieldContext::set_noether(LinearJetOperator delta) {
    if (delta.role() != OperatorRole::Noether) throw DomainError("the antighost sector needs a Noether-role operator");
    noether_ = std::move(delta);
}

void AntifieldContext::set_stage(int k, LinearJetOperator op) {
    if (k < 0) throw DomainError("stage index must be >= 0");
    if (op.role() != OperatorRole::Noether) throw DomainError("stage operators must have the Noether role");
    stages_[k] = std::move(op);
}

namespace {

enum class Sector { Base, Extended, Staged };

// Image of one antifield-type generator (without jet), or nullopt when the sector ignores it.
std::optional<GradedPolynomial> generator_image(VariableId anti, const AntifieldContext& ctx, const LinearJetOperator* delta,
                                                Sector sector) {
    switch (anti.kind()) {
        case VarKind::Antifield: return ctx.euler_lagrange(base_of(anti));
        case VarKind::Antighost:
            if (sector == Sector::Base) return std::nullopt;
            if (delta == nullptr) throw UndeclaredError("no Noether operator declared for antighost " + render_variable(anti));
            return noether_component(*delta, base_of(anti));
        case VarKind::StageAntighost: {
            if (sector != Sector::Staged) return std::nullopt;
            auto it = ctx.stages().find(anti.stage());
            if (it == ctx.stages().end()) {
                throw UndeclaredError("no stage-" + std::to_string(anti.stage()) + " operator declared for " +
                                      render_variable(anti));
            }
            return noether_component(it->second, base_of(anti));
        }
        default: return std::nullopt;
    }
}

GradedPolynomial apply_right(const GradedPolynomial& p, const AntifieldContext& ctx, const LinearJetOperator* delta,
                             Sector sector) {
    GradedPolynomial out;
    for (const auto& jv : p.jet_variables()) {
        auto image = generator_image(jv.var, ctx, delta, sector);
        if (!image || image->is_zero()) continue;
        out += partial_right(p, jv) * total_derivative_multi(*image, jv.jet);
    }
    return out;
}

}  // namespace

GradedPolynomial kt_apply(const GradedPolynomial& p, const AntifieldContext& ctx) {
    return apply_right(p, ctx, nullptr, Sector::Base);
}

GradedPolynomial kt_extended_apply(const GradedPolynomial& p, const AntifieldContext& ctx, const LinearJetOperator& delta) {
    if (delta.role() != OperatorRole::Noether) throw DomainError("the antighost sector needs a Noether-role operator");
    return apply_right(p, ctx, &delta, Sector::Extended);
}

GradedPolynomial kt_extended_apply(const GradedPolynomial& p, const AntifieldContext& ctx) {
    const LinearJetOperator* delta = ctx.noether() ? &*ctx.noether() : nullptr;
    return apply_right(p, ctx, delta, Sector::Extended);
}

GradedPolynomial kt_stage_apply(const GradedPolynomial& p, const AntifieldContext& ctx) {
    const LinearJetOperator* delta = ctx.noether() ? &*ctx.noether() : nullptr;
    return apply_right(p, ctx, delta, Sector::Staged);
}

VerificationReport check_extended_nilpotent(const AntifieldContext& ctx) {
    if (!ctx.noether()) throw UndeclaredError("no Noether operator in the antifield context");
    VerificationReport report;
    report.check = "kt-extended-nilpotent";
    for (auto r : ctx.noether()->params()) {
        GradedPolynomial once = kt_extended_apply(GradedPolynomial::variable(anti_of(r)), ctx);
        report.residuals.push_back({"anti(" + render_variable(r) + ")", kt_extended_apply(once, ctx)});
    }
    report.settle();
    return report;
}

VerificationReport check_weakly_zero(const GradedPolynomial& residual, const ReductionCertificate& cert,
                                     const AntifieldContext& ctx, const std::string& label) {
    GradedPolynomial diff = residual;
    for (const auto& [key, m] : cert.coefficients) {
        const auto& [field, sigma] = key;
        if (field.kind() != VarKind::Field) {
            throw CertificateError("certificate " + label + " references " + render_variable(field) +
                                   ", which has no variational derivative (not a field)");
        }
        diff -= m * total_derivative_multi(ctx.euler_lagrange(field), sigma);
    }
    if (cert.kt_witness) diff -= kt_apply(*cert.kt_witness, ctx);
    VerificationReport report;
    report.check = "check-weakly-zero";
    report.residuals.push_back({label, diff});
    report.certificates.push_back({label, diff.is_zero()});
    report.settle();
    return report;
}

std::string stage_label(int k) { return "stage" + std::to_string(k); }

GradedPolynomial stage_composition(const AntifieldContext& ctx, int k) {
    auto it = ctx.stages().find(k);
    if (it == ctx.stages().end()) throw UndeclaredError("no stage-" + std::to_string(k) + " operator");
    GradedPolynomial out;
    for (auto rk : it->second.params()) {
        GradedPolynomial image = kt_stage_apply(noether_component(it->second, rk), ctx);
        out += GradedPolynomial::variable(rk) * image;
    }
    return out;
}

namespace {

// Shape condition (i): parameters are stage-k ghosts, targets are the previous stage's parameters.
std::optional<std::string> shape_problem(const AntifieldContext& ctx, int k, const LinearJetOperator& op) {
    for (auto p : op.params()) {
        if (p.kind() != VarKind::StageGhost || p.stage() != k) {
            return "parameter " + render_variable(p) + " is not a stage-" + std::to_string(k) + " ghost";
        }
    }
    const std::vector<VariableId>& expected =
        k == 0 ? ctx.noether()->params() : ctx.stages().at(k - 1).params();
    for (auto t : op.targets()) {
        if (std::find(expected.begin(), expected.end(), t) == expected.end()) {
            return "target " + render_variable(t) + " is not a parameter of the previous stage";
        }
    }
    try {
        validate_coefficients(op);
    } catch (const DomainError& e) {
        return std::string(e.what());
    }
    return std::nullopt;
}

}  // namespace

VerificationReport check_reducibility_chain(const AntifieldContext& ctx,
                                            const std::map<std::string, ReductionCertificate>& certificates) {
    if (!ctx.noether()) throw UndeclaredError("reducibility check needs a Noether operator");
    VerificationReport report;
    report.check = "check-reducibility";
    bool ok = true;

    for (auto& [r, expr] : noether_residuals(*ctx.noether(), ctx.lagrangian())) {
        report.residuals.push_back({"noether r=" + render_variable(r), std::move(expr)});
    }

    int top = -1;
    for (const auto& [k, op] : ctx.stages()) {
        if (k != top + 1) {
            report.notes.push_back("stage " + std::to_string(k) + " declared without stage " + std::to_string(top + 1));
            ok = false;
            break;
        }
        if (auto problem = shape_problem(ctx, k, op)) {
            report.notes.push_back("stage " + std::to_string(k) + " shape: " + *problem);
            ok = false;
            break;
        }
        if (op.is_zero()) {
            report.notes.push_back("stage " + std::to_string(k) + " operator is identically zero; chain ends at N = " +
                                   std::to_string(top));
            if (std::next(ctx.stages().find(k)) != ctx.stages().end()) {
                report.notes.push_back("stages above a zero operator are not allowed");
                ok = false;
            }
            break;
        }
        const std::string label = stage_label(k);
        auto cert = certificates.find(label);
        if (cert == certificates.end()) throw CertificateError("missing certificate '" + label + "' for stage " + std::to_string(k));
        VerificationReport stage = check_weakly_zero(stage_composition(ctx, k), cert->second, ctx, label);
        report.residuals.push_back({"stage " + std::to_string(k) + " composition", stage.residuals.front().expr});
        report.certificates.push_back(stage.certificates.front());
        if (!stage.pass) {
            report.notes.push_back("failed at stage " + std::to_string(k));
            ok = false;
            break;
        }
        top = k;
    }
    report.notes.push_back("N = " + std::to_string(top));
    report.assumptions.push_back("non-vanishing of Delta_(k) on-shell and non-exactness are declared, not proven");
    report.assumptions.push_back("completeness of the chain is declared, not proven");
    report.settle(ok);
    return report;
}

}  // namespace nkt
