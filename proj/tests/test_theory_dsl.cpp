#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nkt/jet_calculus.hpp"
#include "nkt/noether.hpp"
#include "nkt/random.hpp"

using namespace nkt;

namespace {

const char* kScalar = "theory scalar\ndim 1\nfield y parity even\nlagrangian 1/2 * d(y;x)^2\n";

GradedPolynomial var(VariableId v, MultiIndex m = {}) { return GradedPolynomial::variable(v, m); }

int levi_civita(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0;
    // Parity of the permutation of (1,2,3).
    int inversions = (a > b) + (a > c) + (b > c);
    return inversions % 2 == 0 ? 1 : -1;
}

int metric(int m) { return m == 0 ? 1 : -1; }

GradedPolynomial a(int r, int mu, MultiIndex m = {}) { return var(VariableId::field("a", {r, mu}), m); }

// F^r_{mn} with lower indices, assembled directly from jet variables.
GradedPolynomial field_strength(int r, int m, int n) {
    GradedPolynomial f = a(r, n, {m}) - a(r, m, {n});
    for (int p = 1; p <= 3; ++p) {
        for (int q = 1; q <= 3; ++q) {
            if (int e = levi_civita(r, p, q)) f += e * a(p, m) * a(q, n);
        }
    }
    return f;
}

GradedPolynomial raised(int r, int m, int n) { return metric(m) * metric(n) * field_strength(r, m, n); }

// E^b_s = d_m F^{mb}_s - eps^r_{sq} F^{bn}_r a^q_n
GradedPolynomial hand_el(int s, int b) {
    GradedPolynomial out;
    for (int m = 0; m < 4; ++m) out += total_derivative(raised(s, m, b), m);
    for (int r = 1; r <= 3; ++r) {
        for (int q = 1; q <= 3; ++q) {
            int e = levi_civita(r, s, q);
            if (e == 0) continue;
            for (int n = 0; n < 4; ++n) out -= e * raised(r, b, n) * a(q, n);
        }
    }
    return out;
}

void check_error(std::string_view text, DiagnosticKind kind) {
    try {
        parse_theory(text);
        FAIL("expected a diagnostic");
    } catch (const ParseError& e) {
        CHECK(e.kind == kind);
        CHECK(e.span.begin <= e.span.end);
        CHECK(e.span.end <= text.size());
    }
}

}  // namespace

TEST_SUITE("theory_dsl") {

TEST_CASE("minimal scalar theory") {
    Theory t = parse_theory(kScalar);
    CHECK(t.name == "scalar");
    CHECK(t.dim == 1);
    VariableId y = VariableId::field("y");
    CHECK(t.lagrangian == Rational(1, 2) * var(y, {0}) * var(y, {0}));
    CHECK(parse_theory(render(t)) == t);
    CHECK(render(parse_theory(render(t))) == render(t));
}

TEST_CASE("Yang-Mills Euler-Lagrange expressions match the hand expansion") {
    Theory t = load_theory("ym_su2");
    for (int s = 1; s <= 3; ++s) {
        for (int b = 0; b < 4; ++b) {
            CHECK(euler_lagrange_component(t.lagrangian, VariableId::field("a", {s, b})) == hand_el(s, b));
        }
    }
}

TEST_CASE("expressions") {
    Theory t = parse_theory("theory e\ndim 1\nfield y parity even\nghost C[1..3] parity odd\nghost c parity odd\nlagrangian 0\n");
    VariableId y = VariableId::field("y");
    VariableId c = VariableId::ghost("c");
    CHECK(parse_expression("y * d(y;x)", t) == var(y) * var(y, {0}));
    CHECK(parse_expression("sum(r,1..3, C[r]*C[r])", t).is_zero());
    GradedPolynomial e = parse_expression("d(c;x) * c", t);
    CHECK(e == -(var(c) * var(c, {0})));
    CHECK(render(e, t.render_options()) == "-c*c[;x]");
    CHECK(parse_expression("d(y; x0)", t) == var(y, {0}));
    CHECK(parse_expression("x0 * y", t) == var(VariableId::coordinate(0)) * var(y));
    CHECK(render(GradedPolynomial{}) == "0");
    // Nesting order of sums does not matter.
    Theory ym = load_theory("ym_su2");
    CHECK(parse_expression("sum(r,1..3, sum(m,0..3, a[r,m]*d(a[r,m];x)))", ym) ==
          parse_expression("sum(m,0..3, sum(r,1..3, a[r,m]*d(a[r,m];x)))", ym));
}

TEST_CASE("diagnostics") {
    std::string text = "theory s\ndim 1\nfield y parity even\nlagrangian y * z\n";
    try {
        parse_theory(text);
        FAIL("expected a diagnostic");
    } catch (const ParseError& e) {
        CHECK(e.kind == DiagnosticKind::Semantic);
        CHECK(e.message.find("z") != std::string::npos);
        CHECK(e.span.line == 4);
        CHECK(e.span.column == 16);
        CHECK(text.substr(e.span.begin, e.span.end - e.span.begin) == "z");
    }
    check_error("theory s\ndim 1\nfield y parity even\nlagrangian y $ y\n", DiagnosticKind::Lexical);
    check_error("theory s\ndim 1\nfield y parity even\nlagrangian (y\n", DiagnosticKind::Syntax);
    check_error("theory s\ndim 1\nfield y parity odd\nlagrangian y\n", DiagnosticKind::Semantic);
    check_error("theory s\ndim 1\nfield y[1..2] parity even\nlagrangian y[3]^2\n", DiagnosticKind::Semantic);
    check_error("theory s\ndim 1\nconstant k[1..2,1..2] antisymmetric = {{0,1},{2,0}}\nfield y parity even\nlagrangian y^2\n",
                DiagnosticKind::Semantic);
    check_error("theory s\ndim 1\nghost e parity odd stage 0\nfield y parity even\nlagrangian y^2\n", DiagnosticKind::Semantic);
}

TEST_CASE("rendered Yang-Mills Noether operator reparses") {
    Theory t = load_theory("ym_su2");
    const LinearJetOperator& delta = t.operators.at("noether");
    std::string text = render(delta, t.render_options());
    LinearJetOperator back = parse_operator(text, t);
    CHECK(back == delta);
    CHECK(check_noether_identity(back, t.lagrangian).pass);
}

TEST_CASE("golden and random theories round-trip") {
    for (const char* name : {"scalar", "scalar_mass", "ym_su2", "maxwell3", "fermion", "twoform", "twoform_wrong"}) {
        Theory t = load_theory(name);
        CHECK(parse_theory(render(t)) == t);
    }
    random::Engine rng(31);
    for (int k = 0; k < 100; ++k) {
        Theory t = random::theory(rng);
        std::string text = render(t);
        CHECK(parse_theory(text) == t);
    }
}

TEST_CASE("mutated input yields a value or a diagnostic") {
    std::string base = read_theory_text("ym_su2");
    random::Engine rng(32);
    for (int k = 0; k < 300; ++k) {
        std::string text = base;
        for (int m = random::uniform(rng, 1, 6); m > 0; --m) {
            auto pos = static_cast<std::size_t>(random::uniform(rng, 0, static_cast<int>(text.size()) - 1));
            switch (random::uniform(rng, 0, 2)) {
                case 0: text[pos] = static_cast<char>(random::uniform(rng, 0, 255)); break;
                case 1: text.erase(pos, static_cast<std::size_t>(random::uniform(rng, 1, 20))); break;
                default: text.insert(pos, text.substr(pos / 2, 10)); break;
            }
        }
        try {
            parse_theory(text);
        } catch (const ParseError& e) {
            CHECK(e.span.end <= text.size());
        }
    }
}

}
