#include "nkt/noether.hpp"

#include <algorithm>
#include <tuple>

#include "nkt/errors.hpp"

namespace nkt {

const char* to_string(OperatorRole r) { return r == OperatorRole::Gauge ? "gauge" : "noether"; }

OperatorRole opposite(OperatorRole r) { return r == OperatorRole::Gauge ? OperatorRole::Noether : OperatorRole::Gauge; }

std::strong_ordering operator<=>(const OperatorKey& a, const OperatorKey& b) {
    if (auto c = a.param <=> b.param; c != 0) return c;
    if (auto c = a.target <=> b.target; c != 0) return c;
    return a.jet <=> b.jet;
}

std::strong_ordering operator<=>(const TrivialTableKey& a, const TrivialTableKey& b) {
    if (auto c = a.param <=> b.param; c != 0) return c;
    if (auto c = a.i <=> b.i; c != 0) return c;
    if (auto c = a.j <=> b.j; c != 0) return c;
    if (auto c = a.lambda <=> b.lambda; c != 0) return c;
    return a.sigma <=> b.sigma;
}

namespace {

void insert_sorted(std::vector<VariableId>& space, VariableId v) {
    auto it = std::lower_bound(space.begin(), space.end(), v);
    if (it == space.end() || *it != v) space.insert(it, v);
}

}  // namespace

LinearJetOperator::LinearJetOperator(OperatorRole role, std::vector<VariableId> params, std::vector<VariableId> targets)
    : role_(role) {
    for (auto v : params) declare_param(v);
    for (auto v : targets) declare_target(v);
}

void LinearJetOperator::declare_param(VariableId v) { insert_sorted(params_, v); }

void LinearJetOperator::declare_target(VariableId v) { insert_sorted(targets_, v); }

void LinearJetOperator::add(VariableId param, VariableId target, const MultiIndex& jet, const GradedPolynomial& c) {
    declare_param(param);
    declare_target(target);
    if (c.is_zero()) return;
    OperatorKey key{param, target, jet};
    auto it = coeffs_.find(key);
    if (it == coeffs_.end()) {
        coeffs_.emplace(key, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
}

GradedPolynomial LinearJetOperator::coeff(VariableId param, VariableId target, const MultiIndex& jet) const {
    auto it = coeffs_.find(OperatorKey{param, target, jet});
    return it == coeffs_.end() ? GradedPolynomial{} : it->second;
}

int LinearJetOperator::max_order() const {
    int m = 0;
    for (const auto& [k, c] : coeffs_) m = std::max(m, k.jet.order());
    return m;
}

void validate_coefficients(const LinearJetOperator& op) {
    for (const auto& [k, c] : op.coeffs()) {
        for (VarKind kind : {VarKind::Ghost, VarKind::StageGhost, VarKind::Antifield, VarKind::Antighost,
                             VarKind::StageAntighost}) {
            if (c.mentions_kind(kind)) {
                throw DomainError(std::string("operator coefficient mentions a ") + to_string(kind) +
                                  " variable; coefficients may depend on fields only");
            }
        }
    }
}

LinearJetOperator eta(const LinearJetOperator& op) {
    LinearJetOperator out(opposite(op.role()), op.params(), op.targets());
    for (const auto& [key, coeff] : op.coeffs()) {
        const int total = key.jet.order();
        for_each_submultiset(key.jet, [&](const MultiIndex& sigma, const MultiIndex& lambda, std::uint64_t mult) {
            GradedPolynomial term = total_derivative_multi(coeff, sigma);
            if (term.is_zero()) return;
            Rational factor(static_cast<unsigned long>(mult));
            if (total % 2 == 1) factor = -factor;
            out.add(key.param, key.target, lambda, term * factor);
        });
    }
    return out;
}

namespace {

struct Slot {
    VariableId out;
    VariableId in;
};

// (output, input) view of a coefficient key, per role.
Slot slot_of(OperatorRole role, const OperatorKey& k) {
    return role == OperatorRole::Gauge ? Slot{k.target, k.param} : Slot{k.param, k.target};
}

void add_slot(LinearJetOperator& op, VariableId out, VariableId in, const MultiIndex& jet, const GradedPolynomial& c) {
    if (op.role() == OperatorRole::Gauge) {
        op.add(in, out, jet, c);
    } else {
        op.add(out, in, jet, c);
    }
}

std::string space_text(const std::vector<VariableId>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) out += ", ";
        out += render_variable(s[i]);
    }
    return out + "}";
}

}  // namespace

LinearJetOperator compose(const LinearJetOperator& outer, const LinearJetOperator& inner) {
    if (outer.role() != inner.role()) throw SpaceMismatchError("cannot compose a gauge operator with a Noether operator");
    if (inner.outputs() != outer.inputs()) {
        throw SpaceMismatchError("inner operator produces " + space_text(inner.outputs()) + " but outer consumes " +
                                 space_text(outer.inputs()));
    }
    const OperatorRole role = outer.role();
    LinearJetOperator out(role, {}, {});
    if (role == OperatorRole::Gauge) {
        for (auto v : inner.params()) out.declare_param(v);
        for (auto v : outer.targets()) out.declare_target(v);
    } else {
        for (auto v : outer.params()) out.declare_param(v);
        for (auto v : inner.targets()) out.declare_target(v);
    }
    // outer^{o,Xi}_m d_Xi (inner^{m,Xi'}_i d_Xi' in_i): split Xi = Sigma + rest, Leibniz multiplicity.
    for (const auto& [ko, co] : outer.coeffs()) {
        Slot so = slot_of(role, ko);
        for (const auto& [ki, ci] : inner.coeffs()) {
            Slot si = slot_of(role, ki);
            if (si.out != so.in) continue;
            for_each_submultiset(ko.jet, [&](const MultiIndex& sigma, const MultiIndex& rest, std::uint64_t mult) {
                GradedPolynomial d = total_derivative_multi(ci, sigma);
                if (d.is_zero()) return;
                GradedPolynomial term = co * d;
                term *= Rational(static_cast<unsigned long>(mult));
                std::vector<int> merged = rest.entries();
                for (int e : ki.jet.entries()) merged.push_back(e);
                add_slot(out, so.out, si.in, MultiIndex(std::span<const int>(merged)), term);
            });
        }
    }
    return out;
}

LinearJetOperator identity_operator(OperatorRole role, const std::vector<VariableId>& space) {
    LinearJetOperator out(role, space, space);
    for (auto v : space) out.add(v, v, {}, GradedPolynomial::constant(1));
    return out;
}

std::map<VariableId, GradedPolynomial> apply_operator(const LinearJetOperator& op,
                                                      const std::map<VariableId, GradedPolynomial>& inputs) {
    std::map<VariableId, GradedPolynomial> out;
    for (auto v : op.outputs()) out.emplace(v, GradedPolynomial{});
    for (const auto& [key, coeff] : op.coeffs()) {
        Slot s = slot_of(op.role(), key);
        auto it = inputs.find(s.in);
        if (it == inputs.end() || it->second.is_zero()) continue;
        out[s.out] += coeff * total_derivative_multi(it->second, key.jet);
    }
    return out;
}

GeneralizedVectorField to_vector_field(const LinearJetOperator& gauge) {
    if (gauge.role() != OperatorRole::Gauge) throw DomainError("only gauge-role operators define vector fields");
    GeneralizedVectorField field;
    for (const auto& [key, coeff] : gauge.coeffs()) {
        // c^r_Xi upsilon^{A,Xi}_r: the parameter jet stands to the left.
        field.components[key.target] += GradedPolynomial::variable(key.param, key.jet) * coeff;
    }
    for (auto it = field.components.begin(); it != field.components.end();) {
        it = it->second.is_zero() ? field.components.erase(it) : std::next(it);
    }
    return field;
}

GradedPolynomial noether_component(const LinearJetOperator& noether, VariableId param) {
    if (noether.role() != OperatorRole::Noether) throw DomainError("expected a Noether-role operator");
    GradedPolynomial out;
    for (const auto& [key, coeff] : noether.coeffs()) {
        if (key.param != param) continue;
        out += coeff * GradedPolynomial::variable(anti_of(key.target), key.jet);
    }
    return out;
}

GradedPolynomial noether_density(const LinearJetOperator& noether) {
    GradedPolynomial out;
    for (auto r : noether.params()) out += GradedPolynomial::variable(r) * noether_component(noether, r);
    return out;
}

std::map<VariableId, GradedPolynomial> noether_residuals(const LinearJetOperator& noether,
                                                         const GradedPolynomial& lagrangian) {
    if (noether.role() != OperatorRole::Noether) throw DomainError("expected a Noether-role operator");
    std::map<VariableId, GradedPolynomial> el;
    for (auto a : noether.targets()) el.emplace(a, euler_lagrange_component(lagrangian, a));
    return apply_operator(noether, el);
}

VerificationReport check_noether_identity(const LinearJetOperator& noether, const GradedPolynomial& lagrangian) {
    if (lagrangian.parity() != ParityClass::Even) throw ParityError("a Lagrangian must be even");
    VerificationReport report;
    report.check = "check-noether";
    for (auto& [r, expr] : noether_residuals(noether, lagrangian)) {
        report.residuals.push_back({"r=" + render_variable(r), std::move(expr)});
    }
    report.settle();
    return report;
}

VerificationReport check_variational(const LinearJetOperator& gauge, const GradedPolynomial& lagrangian) {
    return check_variational(to_vector_field(gauge), lagrangian);
}

DerivedOperator derive_noether_from_gauge(const LinearJetOperator& gauge, const GradedPolynomial& lagrangian) {
    if (gauge.role() != OperatorRole::Gauge) throw DomainError("derive-noether needs a gauge-role operator");
    VerificationReport pre = check_variational(gauge, lagrangian);
    if (!pre.pass) throw PreconditionFailed("not a variational symmetry: upsilon ⌋ δL is not variationally trivial", pre);
    DerivedOperator out{eta(gauge), {}};
    out.report = check_noether_identity(out.op, lagrangian);
    out.report.check = "derive-noether";
    out.report.assumptions = pre.assumptions;
    return out;
}

DerivedOperator derive_gauge_from_noether(const LinearJetOperator& noether, const GradedPolynomial& lagrangian) {
    if (noether.role() != OperatorRole::Noether) throw DomainError("derive-gauge needs a Noether-role operator");
    VerificationReport pre = check_noether_identity(noether, lagrangian);
    if (!pre.pass) throw PreconditionFailed("the Noether identity does not hold", pre);
    DerivedOperator out{eta(noether), {}};
    out.report = check_variational(out.op, lagrangian);
    out.report.check = "derive-gauge";
    bool round_trip = eta(out.op) == noether;
    out.report.notes.push_back(round_trip ? "eta(eta(Delta)) == Delta" : "eta(eta(Delta)) != Delta");
    out.report.settle(round_trip);
    return out;
}

LinearJetOperator trivial_gauge_symmetry(const TrivialTable& table, const GradedPolynomial& lagrangian) {
    for (const auto& [k, t] : table) {
        TrivialTableKey swapped{k.param, k.j, k.i, k.sigma, k.lambda};
        auto it = table.find(swapped);
        GradedPolynomial partner = it == table.end() ? GradedPolynomial{} : it->second;
        if (!(t + partner).is_zero()) {
            throw DomainError("trivial-symmetry table is not antisymmetric at (" + render_variable(k.i) + ", " +
                              render_variable(k.j) + ", " + to_string(k.lambda) + ", " + to_string(k.sigma) + ")");
        }
    }
    LinearJetOperator m(OperatorRole::Noether, {}, {});
    std::map<VariableId, GradedPolynomial> el;
    for (const auto& [k, t] : table) {
        auto it = el.find(k.j);
        if (it == el.end()) it = el.emplace(k.j, euler_lagrange_component(lagrangian, k.j)).first;
        m.add(k.param, k.i, k.lambda, t * total_derivative_multi(it->second, k.sigma));
    }
    return eta(m);
}

}  // namespace nkt
