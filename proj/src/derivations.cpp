#include "nkt/derivations.hpp"

#include "nkt/errors.hpp"
#include "nkt/jet_calculus.hpp"

namespace nkt {

const char* const kTrivialTopologyAssumption =
    "trivial topology: base is contractible and coefficients are polynomial, so a density with "
    "vanishing variational derivatives is d_H-exact up to a pullback form";

const GradedPolynomial* GeneralizedVectorField::component(VariableId v) const {
    auto it = components.find(v);
    return it == components.end() ? nullptr : &it->second;
}

std::optional<Parity> derivation_parity(const GeneralizedVectorField& v) {
    std::optional<Parity> result;
    for (const auto& [var, comp] : v.components) {
        if (var.is_coordinate()) throw DomainError("only vertical derivations are supported");
        if (comp.is_zero()) continue;
        ParityClass pc = comp.parity();
        if (pc == ParityClass::Mixed) {
            throw ParityError("component along " + render_variable(var) + " has mixed parity");
        }
        Parity p = (pc == ParityClass::Odd ? Parity::Odd : Parity::Even) + var.parity();
        if (result && *result != p) {
            throw ParityError("component along " + render_variable(var) + " makes the derivation " +
                              to_string(p) + " but earlier components make it " + to_string(*result));
        }
        result = p;
    }
    return result;
}

GradedPolynomial prolong_apply(const GeneralizedVectorField& v, const GradedPolynomial& p) {
    derivation_parity(v);
    GradedPolynomial out;
    for (const auto& jv : p.jet_variables()) {
        const GradedPolynomial* comp = v.component(jv.var);
        if (comp == nullptr || comp->is_zero()) continue;
        out += total_derivative_multi(*comp, jv.jet) * partial_left(p, jv);
    }
    return out;
}

GradedPolynomial lie_derivative_density(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian) {
    return prolong_apply(v, lagrangian);
}

GradedPolynomial contract_with_EL(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian) {
    derivation_parity(v);
    if (lagrangian.parity() != ParityClass::Even) throw ParityError("a Lagrangian must be even");
    GradedPolynomial out;
    for (const auto& [var, comp] : v.components) {
        if (comp.is_zero()) continue;
        out += comp * euler_lagrange_component(lagrangian, var);
    }
    return out;
}

namespace {

void add_triviality(VerificationReport& report, const GradedPolynomial& density) {
    TrivialityResult t = is_variationally_trivial(density);
    for (auto& [var, expr] : t.residual) report.residuals.push_back({"E[" + render_variable(var) + "]", expr});
    report.assumptions.push_back(kTrivialTopologyAssumption);
    if (t.field_independent && !density.is_zero()) {
        report.notes.push_back("density is field independent; accepted as a pullback from the base");
    }
    report.settle();
}

}  // namespace

VerificationReport check_variational(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian) {
    VerificationReport report;
    report.check = "check-variational";
    add_triviality(report, contract_with_EL(v, lagrangian));
    return report;
}

NilpotencyReport check_nilpotent(const GeneralizedVectorField& v) {
    auto parity = derivation_parity(v);
    if (parity && *parity == Parity::Even) {
        throw ParityError("an even derivation is never nilpotent; nilpotency requires an odd derivation");
    }
    NilpotencyReport report;
    report.nilpotent = true;
    for (const auto& [var, comp] : v.components) {
        GradedPolynomial r = prolong_apply(v, comp);
        if (!r.is_zero()) report.nilpotent = false;
        report.residuals.emplace(var, std::move(r));
    }
    return report;
}

VerificationReport first_variational_residual(const GeneralizedVectorField& v, const GradedPolynomial& lagrangian) {
    VerificationReport report;
    report.check = "first-variational-formula";
    GradedPolynomial r = lie_derivative_density(v, lagrangian) - contract_with_EL(v, lagrangian);
    add_triviality(report, r);
    return report;
}

}  // namespace nkt
