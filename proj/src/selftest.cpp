#include "nkt/selftest.hpp"

#include "nkt/derivations.hpp"
#include "nkt/jet_calculus.hpp"
#include "nkt/koszul_tate.hpp"
#include "nkt/random.hpp"
#include "nkt/theory_dsl.hpp"

namespace nkt {

namespace {

using random::Engine;
using random::PolySpec;

// Two even fields, sometimes an odd one as well.
std::vector<VariableId> some_fields(Engine& rng) {
    std::vector<VariableId> out{VariableId::field("u", {1}), VariableId::field("u", {2})};
    if (random::uniform(rng, 0, 1) == 1) out.push_back(VariableId::field("psi", {}, Parity::Odd));
    return out;
}

struct Suite {
    VerificationReport& report;
    const char* name;
    int failures = 0;

    void record(int trial, const GradedPolynomial& residual) {
        if (residual.is_zero()) return;
        ++failures;
        report.residuals.push_back({std::string(name) + " #" + std::to_string(trial), residual});
    }
    void finish(int count) {
        report.notes.push_back(std::string(name) + ": " + std::to_string(count - failures) + "/" + std::to_string(count) +
                               " passed");
    }
};

}  // namespace

VerificationReport run_selftest(std::uint64_t seed, int count) {
    VerificationReport report;
    report.check = "selftest";
    report.target = "seed " + std::to_string(seed);
    Engine rng(seed);
    const VariableId c1 = VariableId::ghost("c", {1});
    const VariableId c2 = VariableId::ghost("c", {2});

    Suite involution{report, "eta-involution"};
    for (int k = 0; k < count; ++k) {
        auto fields = some_fields(rng);
        PolySpec coeffs{fields, random::uniform(rng, 1, 3), 2, 2, 3, 3, true, Parity::Even};
        random::OperatorSpec spec{{c1, c2}, fields, 3, 6, coeffs};
        auto op = random::linear_operator(rng, random::uniform(rng, 0, 1) ? OperatorRole::Gauge : OperatorRole::Noether, spec);
        GradedPolynomial diff;
        auto twice = eta(eta(op));
        for (const auto& [key, c] : op.coeffs()) diff += c - twice.coeff(key.param, key.target, key.jet);
        for (const auto& [key, c] : twice.coeffs()) {
            if (op.coeff(key.param, key.target, key.jet).is_zero()) diff += c;
        }
        involution.record(k, diff);
    }
    involution.finish(count);

    Suite nilpotent{report, "kt-nilpotent"};
    for (int k = 0; k < count; ++k) {
        auto fields = some_fields(rng);
        int n = random::uniform(rng, 1, 2);
        AntifieldContext ctx(random::polynomial(rng, {fields, n, 2, 3, 4, 3, true, Parity::Even}));
        std::vector<VariableId> pool = fields;
        for (auto f : fields) pool.push_back(anti_of(f));
        GradedPolynomial p = random::polynomial(rng, {pool, n, 2, 3, 4, 3, true, std::nullopt});
        nilpotent.record(k, kt_apply(kt_apply(p, ctx), ctx));
    }
    nilpotent.finish(count);

    Suite first{report, "first-variational"};
    for (int k = 0; k < count; ++k) {
        auto fields = some_fields(rng);
        int n = random::uniform(rng, 1, 2);
        GradedPolynomial L = random::polynomial(rng, {fields, n, 2, 3, 4, 3, true, Parity::Even});
        auto v = random::vector_field(rng, fields, random::uniform(rng, 0, 1) ? Parity::Odd : Parity::Even,
                                      {fields, n, 2, 2, 3, 3, true, std::nullopt});
        VerificationReport r = first_variational_residual(v, L);
        GradedPolynomial total;
        for (const auto& e : r.residuals) total += e.expr;
        first.record(k, total);
    }
    first.finish(count);

    Suite divergence{report, "divergence"};
    for (int k = 0; k < count; ++k) {
        auto fields = some_fields(rng);
        int n = random::uniform(rng, 1, 3);
        GradedPolynomial div;
        for (int d = 0; d < n; ++d) {
            div += total_derivative(random::polynomial(rng, {fields, n, 2, 3, 4, 3, true, Parity::Even}), d);
        }
        GradedPolynomial total;
        for (const auto& [var, e] : euler_lagrange(div, fields)) total += e;
        divergence.record(k, total);
    }
    divergence.finish(count);

    Suite roundtrip{report, "theory-roundtrip"};
    for (int k = 0; k < count; ++k) {
        Theory t = random::theory(rng);
        bool same = false;
        try {
            same = parse_theory(render(t)) == t;
        } catch (const Error&) {
        }
        if (!same) {
            ++roundtrip.failures;
            report.notes.push_back("theory-roundtrip #" + std::to_string(k) + " differs after reparsing");
        }
    }
    roundtrip.finish(count);

    report.settle(roundtrip.failures == 0);
    return report;
}

}  // namespace nkt
