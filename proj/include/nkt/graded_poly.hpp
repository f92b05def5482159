#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nkt/variable.hpp"

namespace nkt {

using Rational = mpq_class;

/// One factor v^exp of a monomial. Odd factors always have exp == 1 in canonical form.
struct Factor {
    JetVariable var;
    unsigned exp = 1;

    friend bool operator==(const Factor&, const Factor&) = default;
    friend std::strong_ordering operator<=>(const Factor& a, const Factor& b) {
        if (auto c = a.var <=> b.var; c != 0) return c;
        return a.exp <=> b.exp;
    }
};

/// Canonically ordered product of jet variables and base coordinates (coefficient kept
/// outside). Base coordinates are even factors that sort first, so the x-polynomial
/// coefficient of a term is its leading coordinate factors.
class Monomial {
public:
    Monomial() = default;

    /// Sorts an arbitrary factor sequence into canonical order. Returns the sign picked up
    /// by transposing odd factors, or nullopt when the product vanishes (repeated odd factor).
    static std::optional<std::pair<int, Monomial>> normalize(std::vector<Factor> raw);

    const std::vector<Factor>& factors() const { return factors_; }
    bool empty() const { return factors_.empty(); }
    Parity parity() const;
    /// Monomial with one factor removed entirely (exponent dropped by one for even powers).
    Monomial without(std::size_t index) const;

    friend bool operator==(const Monomial&, const Monomial&) = default;
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
        return a.factors_ <=> b.factors_;
    }

private:
    explicit Monomial(std::vector<Factor> f) : factors_(std::move(f)) {}
    std::vector<Factor> factors_;
    friend std::optional<std::pair<int, Monomial>> multiply(const Monomial&, const Monomial&);
};

/// Canonical product a*b with graded sign; nullopt if it vanishes.
std::optional<std::pair<int, Monomial>> multiply(const Monomial& a, const Monomial& b);

enum class ParityClass { Even, Odd, Mixed };
const char* to_string(ParityClass p);

/// Unnormalized input term: a coefficient times factors in written order.
struct RawTerm {
    Rational coeff;
    std::vector<Factor> factors;
};

/// Graded-commutative polynomial in jet variables with exact rational coefficients and
/// polynomial dependence on base coordinates, kept in a unique canonical form.
class GradedPolynomial {
public:
    using TermMap = std::map<Monomial, Rational>;

    GradedPolynomial() = default;
    static GradedPolynomial constant(const Rational& c);
    static GradedPolynomial variable(const JetVariable& v);
    static GradedPolynomial variable(VariableId v, MultiIndex jet = {});
    static GradedPolynomial coordinate(int direction);
    static GradedPolynomial monomial(const Rational& c, Monomial m);

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    /// Adds c * m; m must already be canonical.
    void add_term(const Monomial& m, const Rational& c);

    ParityClass parity() const;
    /// Parity, throwing ParityError when mixed; zero counts as even.
    Parity homogeneous_parity() const;
    /// Whether this is a constant (no factors at all).
    bool is_constant() const;
    Rational constant_term() const;
    /// True if some factor is one of the given kinds.
    bool mentions_kind(VarKind kind) const;
    /// Distinct jet variables appearing (coordinates excluded), in canonical order.
    std::vector<JetVariable> jet_variables() const;

    GradedPolynomial& operator+=(const GradedPolynomial& o);
    GradedPolynomial& operator-=(const GradedPolynomial& o);
    GradedPolynomial& operator*=(const Rational& c);
    friend GradedPolynomial operator+(GradedPolynomial a, const GradedPolynomial& b) { return a += b; }
    friend GradedPolynomial operator-(GradedPolynomial a, const GradedPolynomial& b) { return a -= b; }
    friend GradedPolynomial operator-(GradedPolynomial a) { return a *= Rational(-1); }
    friend GradedPolynomial operator*(GradedPolynomial a, const Rational& c) { return a *= c; }
    friend GradedPolynomial operator*(const Rational& c, GradedPolynomial a) { return a *= c; }
    friend GradedPolynomial operator*(const GradedPolynomial& a, const GradedPolynomial& b);

    friend bool operator==(const GradedPolynomial&, const GradedPolynomial&) = default;

private:
    TermMap terms_;
};

/// Canonical form of a raw term list (repeated odd factors vanish, signs from reordering).
GradedPolynomial gp_normalize(std::span<const RawTerm> raw);

GradedPolynomial gp_mul(const GradedPolynomial& p, const GradedPolynomial& q);

ParityClass gp_parity(const GradedPolynomial& p);

/// Rendering options: coordinate names used for jet directions (numeric when empty).
struct RenderOptions {
    std::vector<std::string> coord_names;
};

/// `name`, `name[i1,i2]`, `name[i1;x,x]`, `anti(name)[...]`, or `x0` for a coordinate.
std::string render_variable(const JetVariable& v, const RenderOptions& opts = {});
std::string render_variable(VariableId v, const RenderOptions& opts = {});
std::string render_rational(const Rational& q);
/// Deterministic text: canonical term order, reduced fractions, `0` for zero.
std::string render(const GradedPolynomial& p, const RenderOptions& opts = {});

}  // namespace nkt
