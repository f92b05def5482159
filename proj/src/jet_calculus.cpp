#include "nkt/jet_calculus.hpp"

#include <set>

#include "nkt/errors.hpp"

namespace nkt {

GradedPolynomial total_derivative(const GradedPolynomial& p, int direction) {
    GradedPolynomial out;
    for (const auto& [mono, coeff] : p.terms()) {
        const auto& factors = mono.factors();
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const Factor& f = factors[i];
            std::vector<Factor> raw;
            raw.reserve(factors.size() + 1);
            Rational c = coeff * f.exp;
            if (f.var.var.is_coordinate()) {
                if (f.var.var.components()[0] != direction) continue;
                // d_lambda x^lambda = 1
                for (std::size_t j = 0; j < factors.size(); ++j) {
                    if (j != i) {
                        raw.push_back(factors[j]);
                    } else if (f.exp > 1) {
                        raw.push_back({f.var, f.exp - 1});
                    }
                }
            } else {
                // v^e -> e v^(e-1) v_{Lambda+lambda}, the new factor placed where v stood.
                JetVariable raised = make_jet(f.var.var, f.var.jet.plus(direction));
                for (std::size_t j = 0; j < factors.size(); ++j) {
                    if (j != i) {
                        raw.push_back(factors[j]);
                    } else {
                        if (f.exp > 1) raw.push_back({f.var, f.exp - 1});
                        raw.push_back({raised, 1});
                    }
                }
            }
            auto m = Monomial::normalize(std::move(raw));
            if (!m) continue;
            out.add_term(m->second, m->first < 0 ? Rational(-c) : c);
        }
    }
    return out;
}

GradedPolynomial total_derivative_multi(const GradedPolynomial& p, const MultiIndex& lambda) {
    GradedPolynomial out = p;
    for (int i = 0; i < lambda.order() && !out.is_zero(); ++i) out = total_derivative(out, lambda[i]);
    return out;
}

namespace {

// Shared body of the left/right graded partials; `from_left` selects which side's parities count.
GradedPolynomial graded_partial(const GradedPolynomial& p, const JetVariable& v, bool from_left) {
    GradedPolynomial out;
    const bool odd_v = is_odd(v.parity());
    for (const auto& [mono, coeff] : p.terms()) {
        const auto& factors = mono.factors();
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (factors[i].var != v) continue;
            int passed = 0;
            if (odd_v) {
                std::size_t lo = from_left ? 0 : i + 1;
                std::size_t hi = from_left ? i : factors.size();
                for (std::size_t j = lo; j < hi; ++j) {
                    if (is_odd(factors[j].var.parity()) && factors[j].exp % 2 == 1) ++passed;
                }
            }
            Rational c = coeff * factors[i].exp;
            if (passed % 2 == 1) c = -c;
            // Removing one factor keeps the remaining factors canonically ordered.
            out.add_term(mono.without(i), c);
            break;
        }
    }
    return out;
}

}  // namespace

GradedPolynomial partial_left(const GradedPolynomial& p, const JetVariable& v) { return graded_partial(p, v, true); }

GradedPolynomial partial_right(const GradedPolynomial& p, const JetVariable& v) { return graded_partial(p, v, false); }

GradedPolynomial euler_lagrange_component(const GradedPolynomial& density, VariableId var) {
    GradedPolynomial out;
    for (const auto& jv : density.jet_variables()) {
        if (jv.var != var) continue;
        GradedPolynomial term = total_derivative_multi(partial_left(density, jv), jv.jet);
        if (jv.jet.order() % 2 == 1) {
            out -= term;
        } else {
            out += term;
        }
    }
    return out;
}

VariationalDerivatives euler_lagrange(const GradedPolynomial& lagrangian, std::span<const VariableId> vars) {
    if (lagrangian.parity() != ParityClass::Even) {
        throw ParityError("a Lagrangian must be even; got a " + std::string(to_string(lagrangian.parity())) +
                          " density");
    }
    VariationalDerivatives out;
    for (const auto& v : vars) {
        if (v.is_coordinate()) throw DomainError("cannot vary a base coordinate");
        out.emplace(v, euler_lagrange_component(lagrangian, v));
    }
    return out;
}

std::vector<VariableId> variables_of(const GradedPolynomial& p) {
    std::set<VariableId> seen;
    for (const auto& jv : p.jet_variables()) seen.insert(jv.var);
    return {seen.begin(), seen.end()};
}

TrivialityResult is_variationally_trivial(const GradedPolynomial& density) {
    TrivialityResult result;
    auto vars = variables_of(density);
    result.field_independent = vars.empty();
    for (const auto& v : vars) {
        GradedPolynomial e = euler_lagrange_component(density, v);
        if (!e.is_zero()) result.residual.emplace(v, std::move(e));
    }
    result.trivial = result.residual.empty();
    return result;
}

}  // namespace nkt
