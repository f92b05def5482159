// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "fixtures.hpp"
#include "nkt/derivations.hpp"
#include "nkt/jet_calculus.hpp"
#include "nkt/koszul_tate.hpp"
#include "nkt/noether.hpp"
#include "nkt/random.hpp"
#include "oracles.hpp"

using namespace nkt;

namespace {

using Clock = std::chrono::steady_clock;

GradedPolynomial var(VariableId v, MultiIndex m = {}) { return GradedPolynomial::variable(v, m); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

std::vector<VariableId> take(const std::string& name, bool ghost, int count) {
    std::vector<VariableId> out;
    for (int k = 1; k <= count; ++k) out.push_back(ghost ? VariableId::ghost(name, {k}) : VariableId::field(name, {k}));
    return out;
}

// The operator population shared by the first two criteria.
std::vector<LinearJetOperator> operator_population(std::uint64_t seed, int count) {
    random::Engine rng(seed);
    std::vector<LinearJetOperator> out;
    const VariableId psi = VariableId::field("psi", {}, Parity::Odd);
    for (int k = 0; k < count; ++k) {
        int n = random::uniform(rng, 1, 3);
        auto params = take("c", true, random::uniform(rng, 1, 3));
        auto targets = take("u", false, random::uniform(rng, 1, 3));
        if (random::uniform(rng, 0, 3) == 0) targets.back() = psi;
        std::vector<VariableId> pool = targets;
        pool.push_back(VariableId::field("w"));
        random::PolySpec coeffs{pool, n, 2, 2, 3, 4, true, Parity::Even};
        OperatorRole role = random::uniform(rng, 0, 1) ? OperatorRole::Gauge : OperatorRole::Noether;
        out.push_back(random::linear_operator(rng, role, {params, targets, 3, 8, coeffs}));
    }
    return out;
}

Outcome eta_involution() {
    Outcome o;
    int k = 0, third_order = 0;
    for (const auto& op : operator_population(101, 200)) {
        o.require(eta(eta(op)) == op, "operator #" + std::to_string(k));
        third_order += op.max_order() == 3 ? 1 : 0;
        ++k;
    }
    o.require(third_order >= 20, "population rarely reaches order 3");
    return o;
}

Outcome eta_adjoint() {
    Outcome o;
    int k = 0;
    for (const auto& op : operator_population(101, 200)) {
        std::map<VariableId, GradedPolynomial> probe;
        int slot = 0;
        for (auto v : op.outputs()) probe[v] = var(VariableId::field("probe", {slot++}, v.parity()));
        auto lhs = apply_operator(eta(op), probe);
        auto rhs = oracle::adjoint_apply(op, probe);
        o.require(oracle::difference(lhs, rhs).empty(), "operator #" + std::to_string(k));
        ++k;
    }
    return o;
}

Outcome first_order_closed_form() {
    Outcome o;
    for (int n = 1; n <= 4; ++n) {
        auto params = take("xi", true, 2);
        auto targets = take("phi", false, 3);
        LinearJetOperator op(OperatorRole::Gauge, params, targets);
        auto coeff = [](const char* name, std::vector<int> idx) { return var(VariableId::field(name, std::move(idx))); };
        for (int r = 0; r < 2; ++r) {
            for (int i = 0; i < 3; ++i) {
                op.add(params[r], targets[i], {}, coeff("v", {i, r}));
                for (int mu = 0; mu < n; ++mu) op.add(params[r], targets[i], {mu}, coeff("w", {i, r, mu}));
            }
        }
        LinearJetOperator e = eta(op);
        std::size_t expected_entries = 0;
        for (int r = 0; r < 2; ++r) {
            for (int i = 0; i < 3; ++i) {
                GradedPolynomial zeroth = coeff("v", {i, r});
                for (int mu = 0; mu < n; ++mu) {
                    zeroth -= total_derivative(coeff("w", {i, r, mu}), mu);
                    o.require(e.coeff(params[r], targets[i], {mu}) == -coeff("w", {i, r, mu}), "first-order part");
                }
                o.require(e.coeff(params[r], targets[i], {}) == zeroth, "zeroth-order part");
                expected_entries += 1 + static_cast<std::size_t>(n);
            }
        }
        o.require(e.coeffs().size() == expected_entries, "unexpected extra entries");
    }
    return o;
}

Outcome yang_mills() {
    Outcome o;
    Theory t = load_theory("ym_su2");
    const auto& gauge = t.operators.at("gauge");
    const auto& noether = t.operators.at("noether");
    o.require(check_variational(gauge, t.lagrangian).pass, "(a) gauge symmetry is not variational");
    try {
        auto derived = derive_noether_from_gauge(gauge, t.lagrangian);
        o.require(derived.op == noether, "(b) derived operator differs from the expected identity");
        auto identity = check_noether_identity(derived.op, t.lagrangian);
        o.require(identity.pass && identity.all_residuals_zero(), "(b) Noether residual nonzero");
        auto back = derive_gauge_from_noether(derived.op, t.lagrangian);
        o.require(back.op == gauge, "(c) round trip changed the coefficients");
    } catch (const PreconditionFailed& e) {
        o.require(false, e.what());
    }
    return o;
}

Outcome brst() {
    Outcome o;
    Theory t = load_theory("ym_su2");
    o.require(check_nilpotent(t.derivations.at("brst")).nilpotent, "su(2) BRST not nilpotent");
    auto perturbed = check_nilpotent(t.derivations.at("brst_perturbed"));
    bool nonzero = false;
    for (const auto& r : perturbed.residuals) nonzero = nonzero || !r.second.is_zero();
    o.require(!perturbed.nilpotent && nonzero, "perturbed BRST unexpectedly nilpotent");
    if (nonzero) {
        for (const auto& r : perturbed.residuals) {
            if (!r.second.is_zero()) {
                o.require(!render(r.second, t.render_options()).empty(), "empty rendered residual");
                break;
            }
        }
    }
    return o;
}

Outcome koszul_tate() {
    Outcome o;
    random::Engine rng(606);
    int k = 0;
    for (int draws = 0; k < 200 && draws < 2000; ++draws) {
        int n = random::uniform(rng, 1, 3);
        auto fields = take("u", false, random::uniform(rng, 1, 3));
        if (random::uniform(rng, 0, 2) == 0) fields.push_back(VariableId::field("psi", {}, Parity::Odd));
        AntifieldContext ctx(random::polynomial(rng, {fields, n, 2, 3, 4, 3, true, Parity::Even}));
        std::vector<VariableId> pool = fields;
        for (auto f : fields) pool.push_back(anti_of(f));
        pool.push_back(VariableId::ghost("c"));
        GradedPolynomial p = random::polynomial(rng, {pool, n, 2, 3, 5, 3, true, std::nullopt});
        GradedPolynomial once = kt_apply(p, ctx);
        if (once.is_zero()) continue;  // redraw degenerate cases
        o.require(kt_apply(once, ctx).is_zero(), "kt^2 nonzero on case #" + std::to_string(k));
        ++k;
    }
    o.require(k == 200, "could not draw 200 nontrivial cases");

    auto biconditional = [&](const GradedPolynomial& L, const LinearJetOperator& delta, bool expected, const char* which) {
        AntifieldContext ctx(L);
        ctx.set_noether(delta);
        bool nil = check_extended_nilpotent(ctx).pass;
        bool identity = check_noether_identity(delta, L).pass;
        o.require(nil == identity && identity == expected, std::string("biconditional fails on ") + which);
    };
    Theory ym = load_theory("ym_su2");
    biconditional(ym.lagrangian, ym.operators.at("noether"), true, "Yang-Mills");
    Theory mass = load_theory("scalar_mass");
    biconditional(mass.lagrangian, mass.operators.at("bad"), false, "the failing operator");
    return o;
}

Outcome first_variational() {
    Outcome o;
    random::Engine rng(707);
    const VariableId chi = VariableId::field("chi", {}, Parity::Odd);
    int k = 0, draws = 0;
    while (k < 200 && draws < 2000) {
        ++draws;
        int n = random::uniform(rng, 1, 2);
        auto fields = take("u", false, random::uniform(rng, 1, 2));
        if (random::uniform(rng, 0, 2) == 0) fields.push_back(VariableId::field("psi", {}, Parity::Odd));
        GradedPolynomial L = random::polynomial(rng, {fields, n, 2, 3, 4, 3, true, Parity::Even});
        Parity theta = random::uniform(rng, 0, 1) ? Parity::Odd : Parity::Even;
        // An odd field in the component pool lets odd derivations act on even fields.
        std::vector<VariableId> pool = fields;
        pool.push_back(chi);
        auto v = random::vector_field(rng, fields, theta, {pool, n, 2, 2, 4, 3, true, std::nullopt});
        GradedPolynomial lie = lie_derivative_density(v, L);
        if (lie.is_zero()) continue;  // redraw degenerate cases
        o.require(lie == oracle::prolong(v, L, theta), "Lie derivative disagrees with Leibniz expansion");
        GradedPolynomial defect = lie - contract_with_EL(v, L);
        pool.insert(pool.end(), fields.begin(), fields.end());
        for (auto f : pool) {
            o.require(oracle::euler_lagrange(defect, f).is_zero(), "nonzero variational derivative, case #" + std::to_string(k));
        }
        ++k;
    }
    o.require(k == 200, "could not draw 200 nontrivial cases");
    return o;
}

Outcome divergence() {
    Outcome o;
    random::Engine rng(808);
    int k = 0;
    for (int draws = 0; k < 200 && draws < 2000; ++draws) {
        int n = random::uniform(rng, 1, 3);
        auto fields = take("u", false, random::uniform(rng, 1, 3));
        if (random::uniform(rng, 0, 2) == 0) fields.push_back(VariableId::field("psi", {}, Parity::Odd));
        GradedPolynomial div;
        for (int d = 0; d < n; ++d) div += total_derivative(random::polynomial(rng, {fields, n, 2, 3, 4, 3, true, Parity::Even}), d);
        if (variables_of(div).empty()) continue;  // redraw divergences free of fields
        for (const auto& [f, e] : euler_lagrange(div, fields)) {
            o.require(e.is_zero(), "nonzero Euler-Lagrange expression, case #" + std::to_string(k));
        }
        ++k;
    }
    o.require(k == 200, "could not draw 200 nontrivial cases");
    return o;
}

Outcome negative_controls() {
    Outcome o;
    const VariableId y = VariableId::field("y");
    const VariableId c = VariableId::ghost("c");
    GradedPolynomial L = Rational(1, 2) * var(y) * var(y);
    LinearJetOperator bad(OperatorRole::Noether, {c}, {y});
    bad.add(c, y, {}, GradedPolynomial::constant(1));
    auto r1 = check_noether_identity(bad, L);
    o.require(!r1.pass && r1.residuals.size() == 1 && r1.residuals[0].expr == var(y), "Noether residual is not y");
    GeneralizedVectorField scale;
    scale.components.emplace(y, var(y));
    auto r2 = check_variational(scale, L);
    o.require(!r2.pass && r2.residuals.size() == 1 && r2.residuals[0].expr == 2 * var(y), "variational residual is not 2y");
    return o;
}

Outcome parser() {
    Outcome o;
    for (const char* name : {"scalar", "scalar_mass", "ym_su2", "maxwell3", "fermion", "twoform", "twoform_wrong"}) {
        Theory t = load_theory(name);
        o.require(parse_theory(render(t)) == t, std::string("golden theory ") + name);
    }
    random::Engine rng(1010);
    for (int k = 0; k < 500; ++k) {
        Theory t = random::theory(rng);
        try {
            o.require(parse_theory(render(t)) == t, "random theory #" + std::to_string(k));
        } catch (const ParseError& e) {
            o.require(false, "random theory #" + std::to_string(k) + ": " + e.what());
        }
    }
    std::vector<std::string> seeds;
    for (const char* name : {"scalar", "ym_su2", "twoform"}) seeds.push_back(read_theory_text(name));
    for (int k = 0; k < 3000; ++k) {
        std::string text;
        if (k % 3 == 0) {
            // Pure random bytes.
            for (int b = random::uniform(rng, 0, 200); b > 0; --b) text.push_back(static_cast<char>(random::uniform(rng, 0, 255)));
        } else {
            text = seeds[static_cast<std::size_t>(k) % seeds.size()];
            for (int m = random::uniform(rng, 1, 8); m > 0 && !text.empty(); --m) {
                auto pos = static_cast<std::size_t>(random::uniform(rng, 0, static_cast<int>(text.size()) - 1));
                switch (random::uniform(rng, 0, 2)) {
                    case 0: text[pos] = static_cast<char>(random::uniform(rng, 0, 255)); break;
                    case 1: text.erase(pos, static_cast<std::size_t>(random::uniform(rng, 1, 30))); break;
                    default: text.insert(pos, text.substr(pos / 2, 16)); break;
                }
            }
        }
        try {
            parse_theory(text);
        } catch (const ParseError& e) {
            o.require(e.span.begin <= e.span.end && e.span.end <= text.size(), "diagnostic span outside the input");
        } catch (const std::exception& e) {
            o.require(false, std::string("fuzz input raised a non-diagnostic exception: ") + e.what());
        }
    }
    return o;
}

struct Criterion {
    int number;
    const char* title;
    std::function<Outcome()> run;
    double budget_s;  // 0 for no runtime budget
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "eta involution on 200 random operators", eta_involution, 30},
        {2, "eta agrees with the formal adjoint on a probe", eta_adjoint, 0},
        {3, "first-order closed form of eta", first_order_closed_form, 0},
        {4, "Yang-Mills gauge symmetry, Noether identity and round trip", yang_mills, 60},
        {5, "BRST nilpotency and perturbed negative control", brst, 0},
        {6, "Koszul-Tate nilpotency and the Noether biconditional", koszul_tate, 0},
        {7, "first variational formula on 200 random derivations", first_variational, 0},
        {8, "divergences have vanishing Euler-Lagrange expressions", divergence, 0},
        {9, "negative controls report residuals y and 2*y", negative_controls, 0},
        {10, "parser round trips and fuzzing", parser, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (c.budget_s > 0 && secs >= c.budget_s) o.require(false, "over the runtime budget");
        std::ostringstream line;
        line << (o.pass ? "[PASS] " : "[FAIL] ") << c.number << ". " << c.title;
        line.setf(std::ios::fixed);
        line.precision(2);
        line << " (" << secs << " s)";
        if (!o.pass) line << ": " << o.detail;
        std::cout << line.str() << '\n';
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
