#include "nkt/graded_poly.hpp"

#include <set>

#include "nkt/errors.hpp"

namespace nkt {

const char* to_string(ParityClass p) {
    switch (p) {
        case ParityClass::Even: return "even";
        case ParityClass::Odd: return "odd";
        case ParityClass::Mixed: return "mixed";
    }
    return "?";
}

std::optional<std::pair<int, Monomial>> Monomial::normalize(std::vector<Factor> raw) {
    int sign = 1;
    // Insertion sort; every transposition of two odd factors flips the sign.
    for (std::size_t i = 1; i < raw.size(); ++i) {
        std::size_t j = i;
        while (j > 0 && raw[j].var < raw[j - 1].var) {
            if (raw[j].exp % 2 == 1 && raw[j - 1].exp % 2 == 1 && is_odd(raw[j].var.parity()) &&
                is_odd(raw[j - 1].var.parity())) {
                sign = -sign;
            }
            std::swap(raw[j], raw[j - 1]);
            --j;
        }
    }
    std::vector<Factor> out;
    out.reserve(raw.size());
    for (auto& f : raw) {
        if (f.exp == 0) continue;
        if (is_odd(f.var.parity()) && f.exp > 1) return std::nullopt;
        if (!out.empty() && out.back().var == f.var) {
            if (is_odd(f.var.parity())) return std::nullopt;
            out.back().exp += f.exp;
        } else {
            out.push_back(std::move(f));
        }
    }
    return std::make_pair(sign, Monomial(std::move(out)));
}

Parity Monomial::parity() const {
    Parity p = Parity::Even;
    for (const auto& f : factors_) {
        if (f.exp % 2 == 1) p = p + f.var.parity();
    }
    return p;
}

Monomial Monomial::without(std::size_t index) const {
    Monomial out = *this;
    if (out.factors_[index].exp > 1) {
        --out.factors_[index].exp;
    } else {
        out.factors_.erase(out.factors_.begin() + static_cast<std::ptrdiff_t>(index));
    }
    return out;
}

std::optional<std::pair<int, Monomial>> multiply(const Monomial& a, const Monomial& b) {
    const auto& fa = a.factors_;
    const auto& fb = b.factors_;
    std::vector<Factor> out;
    out.reserve(fa.size() + fb.size());
    // Count odd factors of `a` still waiting; an odd factor taken from `b` passes all of them.
    int odd_left_in_a = 0;
    for (const auto& f : fa) odd_left_in_a += is_odd(f.var.parity()) ? 1 : 0;
    int sign = 1;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < fa.size() || j < fb.size()) {
        if (j == fb.size() || (i < fa.size() && fa[i].var < fb[j].var)) {
            if (is_odd(fa[i].var.parity())) --odd_left_in_a;
            out.push_back(fa[i++]);
        } else if (i == fa.size() || fb[j].var < fa[i].var) {
            if (is_odd(fb[j].var.parity()) && odd_left_in_a % 2 == 1) sign = -sign;
            out.push_back(fb[j++]);
        } else {
            if (is_odd(fa[i].var.parity())) return std::nullopt;
            Factor merged = fa[i++];
            merged.exp += fb[j++].exp;
            out.push_back(std::move(merged));
        }
    }
    return std::make_pair(sign, Monomial(std::move(out)));
}

GradedPolynomial GradedPolynomial::constant(const Rational& c) {
    GradedPolynomial p;
    p.add_term(Monomial{}, c);
    return p;
}

GradedPolynomial GradedPolynomial::variable(const JetVariable& v) {
    auto m = Monomial::normalize({Factor{v, 1}});
    GradedPolynomial p;
    p.add_term(m->second, Rational(m->first));
    return p;
}

GradedPolynomial GradedPolynomial::variable(VariableId v, MultiIndex jet) { return variable(make_jet(v, jet)); }

GradedPolynomial GradedPolynomial::coordinate(int direction) {
    return variable(JetVariable{VariableId::coordinate(direction), {}});
}

GradedPolynomial GradedPolynomial::monomial(const Rational& c, Monomial m) {
    GradedPolynomial p;
    p.add_term(m, c);
    return p;
}

void GradedPolynomial::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

ParityClass GradedPolynomial::parity() const {
    if (terms_.empty()) return ParityClass::Even;
    Parity first = terms_.begin()->first.parity();
    for (const auto& [m, c] : terms_) {
        if (m.parity() != first) return ParityClass::Mixed;
    }
    return first == Parity::Even ? ParityClass::Even : ParityClass::Odd;
}

Parity GradedPolynomial::homogeneous_parity() const {
    switch (parity()) {
        case ParityClass::Even: return Parity::Even;
        case ParityClass::Odd: return Parity::Odd;
        case ParityClass::Mixed: break;
    }
    throw ParityError("expression has mixed Grassmann parity");
}

bool GradedPolynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational GradedPolynomial::constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
}

bool GradedPolynomial::mentions_kind(VarKind kind) const {
    for (const auto& [m, c] : terms_) {
        for (const auto& f : m.factors()) {
            if (f.var.var.kind() == kind) return true;
        }
    }
    return false;
}

std::vector<JetVariable> GradedPolynomial::jet_variables() const {
    std::set<JetVariable> seen;
    for (const auto& [m, c] : terms_) {
        for (const auto& f : m.factors()) {
            if (!f.var.var.is_coordinate()) seen.insert(f.var);
        }
    }
    return {seen.begin(), seen.end()};
}

GradedPolynomial& GradedPolynomial::operator+=(const GradedPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

GradedPolynomial& GradedPolynomial::operator-=(const GradedPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

GradedPolynomial& GradedPolynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

GradedPolynomial operator*(const GradedPolynomial& a, const GradedPolynomial& b) {
    GradedPolynomial out;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            auto prod = multiply(ma, mb);
            if (!prod) continue;
            Rational c = ca * cb;
            if (prod->first < 0) c = -c;
            out.add_term(prod->second, c);
        }
    }
    return out;
}

GradedPolynomial gp_normalize(std::span<const RawTerm> raw) {
    GradedPolynomial out;
    for (const auto& t : raw) {
        for (const auto& f : t.factors) make_jet(f.var.var, f.var.jet);
        auto m = Monomial::normalize(t.factors);
        if (!m) continue;
        out.add_term(m->second, m->first < 0 ? Rational(-t.coeff) : t.coeff);
    }
    return out;
}

GradedPolynomial gp_mul(const GradedPolynomial& p, const GradedPolynomial& q) { return p * q; }

ParityClass gp_parity(const GradedPolynomial& p) { return p.parity(); }

std::string render_rational(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return c.get_str();
}

std::string render_variable(VariableId v, const RenderOptions& opts) { return render_variable(JetVariable{v, {}}, opts); }

std::string render_variable(const JetVariable& v, const RenderOptions& opts) {
    const VariableId& id = v.var;
    if (id.is_coordinate()) return id.name();
    std::string out = id.is_anti() ? "anti(" + id.name() + ")" : id.name();
    const auto& comps = id.components();
    if (comps.empty() && v.jet.empty()) return out;
    out += '[';
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(comps[i]);
    }
    if (!v.jet.empty()) {
        out += ';';
        for (int i = 0; i < v.jet.order(); ++i) {
            if (i > 0) out += ',';
            int d = v.jet[i];
            if (static_cast<std::size_t>(d) < opts.coord_names.size()) {
                out += opts.coord_names[static_cast<std::size_t>(d)];
            } else {
                out += std::to_string(d);
            }
        }
    }
    out += ']';
    return out;
}

std::string render(const GradedPolynomial& p, const RenderOptions& opts) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        std::string term;
        Rational mag = abs(c);
        bool negative = c < 0;
        if (m.empty()) {
            term = render_rational(mag);
        } else {
            if (mag != 1) term = render_rational(mag) + "*";
            bool first_factor = true;
            for (const auto& f : m.factors()) {
                if (!first_factor) term += '*';
                first_factor = false;
                term += render_variable(f.var, opts);
                if (f.exp != 1) term += "^" + std::to_string(f.exp);
            }
        }
        if (first) {
            out = negative ? "-" + term : term;
            first = false;
        } else {
            out += negative ? " - " : " + ";
            out += term;
        }
    }
    return out;
}

}  // namespace nkt
