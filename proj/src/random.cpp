#include "nkt/random.hpp"

namespace nkt::random {

int uniform(Engine& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

MultiIndex multiindex(Engine& rng, int dim, int max_order) {
    int order = uniform(rng, 0, max_order);
    std::vector<int> entries;
    for (int i = 0; i < order; ++i) entries.push_back(uniform(rng, 0, dim - 1));
    return MultiIndex(std::span<const int>(entries));
}

Rational rational(Engine& rng, int range) {
    int num = 0;
    while (num == 0) num = uniform(rng, -range, range);
    Rational q(num, uniform(rng, 1, 3));
    q.canonicalize();
    return q;
}

GradedPolynomial polynomial(Engine& rng, const PolySpec& spec) {
    GradedPolynomial out;
    int terms = uniform(rng, 1, spec.max_terms);
    for (int t = 0; t < terms; ++t) {
        std::vector<Factor> factors;
        int degree = uniform(rng, 0, spec.max_degree);
        for (int d = 0; d < degree; ++d) {
            bool coord = spec.coordinates && uniform(rng, 0, 4) == 0;
            if (coord || spec.vars.empty()) {
                if (!spec.coordinates) continue;
                factors.push_back({JetVariable{VariableId::coordinate(uniform(rng, 0, spec.dim - 1)), {}}, 1});
            } else {
                VariableId v = spec.vars[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(spec.vars.size()) - 1))];
                factors.push_back({make_jet(v, multiindex(rng, spec.dim, spec.max_jet_order)), 1});
            }
        }
        RawTerm raw{rational(rng, spec.coeff_range), std::move(factors)};
        GradedPolynomial term = gp_normalize(std::span<const RawTerm>(&raw, 1));
        if (spec.parity && term.parity() != (*spec.parity == Parity::Even ? ParityClass::Even : ParityClass::Odd)) {
            continue;
        }
        out += term;
    }
    return out;
}

LinearJetOperator linear_operator(Engine& rng, OperatorRole role, const OperatorSpec& spec) {
    LinearJetOperator op(role, spec.params, spec.targets);
    int entries = uniform(rng, 1, spec.max_entries);
    for (int e = 0; e < entries; ++e) {
        VariableId r = spec.params[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(spec.params.size()) - 1))];
        VariableId a = spec.targets[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(spec.targets.size()) - 1))];
        op.add(r, a, multiindex(rng, spec.coefficients.dim, spec.max_order), polynomial(rng, spec.coefficients));
    }
    return op;
}

GeneralizedVectorField vector_field(Engine& rng, const std::vector<VariableId>& targets, Parity parity,
                                    const PolySpec& components) {
    GeneralizedVectorField field;
    for (auto a : targets) {
        if (uniform(rng, 0, 3) == 0) continue;
        PolySpec spec = components;
        spec.parity = parity + a.parity();
        GradedPolynomial c = polynomial(rng, spec);
        if (!c.is_zero()) field.components.emplace(a, std::move(c));
    }
    return field;
}

}  // namespace nkt::random

namespace nkt::random {

namespace {

std::vector<IndexRange> random_ranges(Engine& rng, int count, bool named) {
    std::vector<IndexRange> out;
    for (int k = 0; k < count; ++k) {
        int lo = uniform(rng, -1, 2);
        out.push_back({named ? "i" + std::to_string(k) : "", lo, lo + uniform(rng, 0, 2)});
    }
    return out;
}

VariableId pick(Engine& rng, const std::vector<VariableId>& pool) {
    return pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pool.size()) - 1))];
}

}  // namespace

Theory theory(Engine& rng) {
    Theory t;
    t.name = "t" + std::to_string(uniform(rng, 0, 999));
    t.dim = uniform(rng, 1, 3);
    t.coords = default_coordinates(t.dim);
    if (uniform(rng, 0, 3) == 0) {
        for (int k = 0; k < t.dim; ++k) t.coords[static_cast<std::size_t>(k)] = "u" + std::to_string(k);
    }

    const int nfields = uniform(rng, 1, 3);
    for (int k = 0; k < nfields; ++k) {
        VariableDecl d{"f" + std::to_string(k), VarKind::Field, -1, uniform(rng, 0, 2) == 0 ? Parity::Odd : Parity::Even,
                       random_ranges(rng, uniform(rng, 0, 2), uniform(rng, 0, 1) == 1)};
        t.variables.push_back(d);
    }
    const int nghosts = uniform(rng, 1, 2);
    for (int k = 0; k < nghosts; ++k) {
        t.variables.push_back({"g" + std::to_string(k), VarKind::Ghost, -1, uniform(rng, 0, 3) == 0 ? Parity::Even : Parity::Odd,
                               random_ranges(rng, uniform(rng, 0, 1), true)});
    }
    if (uniform(rng, 0, 1) == 1) {
        int stage = uniform(rng, 0, 2);
        t.variables.push_back({"s", VarKind::StageGhost, stage, stage % 2 == 1 ? Parity::Odd : Parity::Even, {}});
    }

    for (int k = uniform(rng, 0, 2); k > 0; --k) {
        ConstantTensor c;
        c.dims = random_ranges(rng, uniform(rng, 0, 2), uniform(rng, 0, 1) == 1);
        for (std::size_t v = 0; v < c.volume(); ++v) c.values.push_back(uniform(rng, 0, 2) == 0 ? Rational(0) : rational(rng, 5));
        t.constants.emplace_back("k" + std::to_string(k), std::move(c));
    }

    std::vector<VariableId> fields, ghosts, all;
    for (const auto& d : t.variables) {
        for (auto v : d.all()) {
            (d.kind == VarKind::Field ? fields : ghosts).push_back(v);
            all.push_back(v);
        }
    }

    PolySpec lag{fields, t.dim, 2, 3, 4, 4, true, Parity::Even};
    t.lagrangian = polynomial(rng, lag);

    PolySpec coeffs{fields, t.dim, 1, 2, 3, 3, true, std::nullopt};
    for (int k = uniform(rng, 0, 2); k > 0; --k) {
        OperatorRole role = uniform(rng, 0, 1) == 0 ? OperatorRole::Gauge : OperatorRole::Noether;
        OperatorSpec spec{{pick(rng, ghosts)}, {pick(rng, fields)}, 2, 4, coeffs};
        if (uniform(rng, 0, 1) == 1) spec.params.push_back(pick(rng, ghosts));
        if (uniform(rng, 0, 1) == 1) spec.targets.push_back(pick(rng, all));
        t.operators.emplace("op" + std::to_string(k), linear_operator(rng, role, spec));
    }

    PolySpec comps{all, t.dim, 2, 2, 3, 3, true, std::nullopt};
    for (int k = uniform(rng, 0, 2); k > 0; --k) {
        std::vector<VariableId> targets{pick(rng, all), pick(rng, all)};
        auto field = vector_field(rng, targets, uniform(rng, 0, 1) == 0 ? Parity::Even : Parity::Odd, comps);
        if (uniform(rng, 0, 2) == 0) field.components[anti_of(pick(rng, fields))] = polynomial(rng, comps);
        for (auto it = field.components.begin(); it != field.components.end();) {
            it = it->second.is_zero() ? field.components.erase(it) : std::next(it);
        }
        t.derivations.emplace("v" + std::to_string(k), std::move(field));
    }

    PolySpec anti_pool{{}, t.dim, 1, 2, 3, 3, false, std::nullopt};
    for (auto f : fields) anti_pool.vars.push_back(anti_of(f));
    for (auto g : ghosts) anti_pool.vars.push_back(g);
    for (int k = uniform(rng, 0, 2); k > 0; --k) {
        ReductionCertificate cert;
        for (int e = uniform(rng, 0, 3); e > 0; --e) {
            GradedPolynomial m = polynomial(rng, coeffs);
            if (!m.is_zero()) cert.coefficients[{pick(rng, fields), multiindex(rng, t.dim, 2)}] = m;
        }
        if (uniform(rng, 0, 1) == 1) cert.kt_witness = polynomial(rng, anti_pool);
        t.certificates.emplace("stage" + std::to_string(k - 1), std::move(cert));
    }
    return t;
}

}  // namespace nkt::random
