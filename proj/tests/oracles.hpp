#pragma once
// Independent reference computations used to cross-check the library. They work on
// the raw factor lists of canonical monomials and only reuse the library's
// normalization and its single-direction total derivative.

#include <algorithm>
#include <map>
#include <vector>

#include "nkt/derivations.hpp"
#include "nkt/jet_calculus.hpp"
#include "nkt/noether.hpp"

namespace oracle {

using namespace nkt;

// Factor occurrences with exponents unrolled: y^3 becomes y, y, y.
inline std::vector<JetVariable> unroll(const Monomial& m) {
    std::vector<JetVariable> out;
    for (const auto& f : m.factors()) {
        for (unsigned k = 0; k < f.exp; ++k) out.push_back(f.var);
    }
    return out;
}

inline GradedPolynomial from_raw(std::vector<RawTerm>& raw) { return gp_normalize(raw); }

// Left derivative: move each occurrence of v to the front, counting odd factors passed.
inline GradedPolynomial partial_left(const GradedPolynomial& p, const JetVariable& v) {
    std::vector<RawTerm> raw;
    for (const auto& [m, c] : p.terms()) {
        auto occ = unroll(m);
        int odd_before = 0;
        for (std::size_t i = 0; i < occ.size(); ++i) {
            if (occ[i] == v) {
                Rational coeff = c;
                if (is_odd(v.parity()) && odd_before % 2 == 1) coeff = -coeff;
                std::vector<Factor> rest;
                for (std::size_t j = 0; j < occ.size(); ++j) {
                    if (j != i) rest.push_back({occ[j], 1});
                }
                raw.push_back({coeff, rest});
            }
            if (is_odd(occ[i].parity())) ++odd_before;
        }
    }
    return from_raw(raw);
}

// Right derivative: move each occurrence to the back.
inline GradedPolynomial partial_right(const GradedPolynomial& p, const JetVariable& v) {
    std::vector<RawTerm> raw;
    for (const auto& [m, c] : p.terms()) {
        auto occ = unroll(m);
        for (std::size_t i = 0; i < occ.size(); ++i) {
            if (occ[i] != v) continue;
            int odd_after = 0;
            for (std::size_t j = i + 1; j < occ.size(); ++j) odd_after += is_odd(occ[j].parity()) ? 1 : 0;
            Rational coeff = c;
            if (is_odd(v.parity()) && odd_after % 2 == 1) coeff = -coeff;
            std::vector<Factor> rest;
            for (std::size_t j = 0; j < occ.size(); ++j) {
                if (j != i) rest.push_back({occ[j], 1});
            }
            raw.push_back({coeff, rest});
        }
    }
    return from_raw(raw);
}

inline GradedPolynomial d_multi(GradedPolynomial p, const MultiIndex& m) {
    for (int d : m.entries()) p = total_derivative(p, d);
    return p;
}

inline std::vector<JetVariable> jets_of(const GradedPolynomial& p, VariableId v) {
    std::vector<JetVariable> out;
    for (const auto& [m, c] : p.terms()) {
        for (const auto& f : m.factors()) {
            if (f.var.var == v && std::find(out.begin(), out.end(), f.var) == out.end()) out.push_back(f.var);
        }
    }
    return out;
}

// E_A = sum_Lambda (-1)^|Lambda| d_Lambda (left d/dA_Lambda), using the oracle partial.
inline GradedPolynomial euler_lagrange(const GradedPolynomial& density, VariableId v) {
    GradedPolynomial out;
    for (const auto& jv : jets_of(density, v)) {
        GradedPolynomial term = d_multi(oracle::partial_left(density, jv), jv.jet);
        if (jv.jet.order() % 2 == 1) term = -term;
        out += term;
    }
    return out;
}

// Leibniz rule: theta(f1...fk) = sum_i (+-) f1...theta(fi)...fk, with the sign of moving
// the derivation past the odd factors to the left of position i.
inline GradedPolynomial prolong(const GeneralizedVectorField& v, const GradedPolynomial& p, Parity theta) {
    GradedPolynomial out;
    for (const auto& [m, c] : p.terms()) {
        auto occ = unroll(m);
        int odd_before = 0;
        for (std::size_t i = 0; i < occ.size(); ++i) {
            const GradedPolynomial* comp = occ[i].var.is_coordinate() ? nullptr : v.component(occ[i].var);
            if (comp) {
                GradedPolynomial image = d_multi(*comp, occ[i].jet);
                GradedPolynomial left = GradedPolynomial::constant(is_odd(theta) && odd_before % 2 == 1 ? -c : c);
                for (std::size_t j = 0; j < i; ++j) left = left * GradedPolynomial::variable(occ[j]);
                GradedPolynomial right = GradedPolynomial::constant(1);
                for (std::size_t j = i + 1; j < occ.size(); ++j) right = right * GradedPolynomial::variable(occ[j]);
                out += left * image * right;
            }
            if (is_odd(occ[i].parity())) ++odd_before;
        }
    }
    return out;
}

// Formal adjoint applied to a probe section: out = sum_Xi (-1)^|Xi| d_Xi (P^Xi * probe),
// one term per stored multi-index, with derivatives applied one direction at a time.
inline std::map<VariableId, GradedPolynomial> adjoint_apply(const LinearJetOperator& op,
                                                            const std::map<VariableId, GradedPolynomial>& probe) {
    std::map<VariableId, GradedPolynomial> out;
    for (const auto& [key, coeff] : op.coeffs()) {
        const bool gauge = op.role() == OperatorRole::Gauge;
        VariableId in_of_adjoint = gauge ? key.target : key.param;
        VariableId out_of_adjoint = gauge ? key.param : key.target;
        auto it = probe.find(in_of_adjoint);
        if (it == probe.end()) continue;
        GradedPolynomial term = d_multi(coeff * it->second, key.jet);
        if (key.jet.order() % 2 == 1) term = -term;
        out[out_of_adjoint] += term;
    }
    return out;
}

// Direct application sum_Xi P^Xi d_Xi(input) with one-direction-at-a-time derivatives.
inline std::map<VariableId, GradedPolynomial> apply(const LinearJetOperator& op,
                                                    const std::map<VariableId, GradedPolynomial>& input) {
    std::map<VariableId, GradedPolynomial> out;
    for (const auto& [key, coeff] : op.coeffs()) {
        const bool gauge = op.role() == OperatorRole::Gauge;
        VariableId in = gauge ? key.param : key.target;
        VariableId o = gauge ? key.target : key.param;
        auto it = input.find(in);
        if (it == input.end()) continue;
        out[o] += coeff * d_multi(it->second, key.jet);
    }
    return out;
}

inline bool all_zero(const std::map<VariableId, GradedPolynomial>& m) {
    for (const auto& [k, v] : m) {
        if (!v.is_zero()) return false;
    }
    return true;
}

inline std::map<VariableId, GradedPolynomial> difference(std::map<VariableId, GradedPolynomial> a,
                                                         const std::map<VariableId, GradedPolynomial>& b) {
    for (const auto& [k, v] : b) a[k] -= v;
    for (auto it = a.begin(); it != a.end();) it = it->second.is_zero() ? a.erase(it) : std::next(it);
    return a;
}

}  // namespace oracle
