#include "nkt/theory_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>

#include "nkt/jet_calculus.hpp"

namespace nkt {

const char* to_string(DiagnosticKind k) {
    switch (k) {
        case DiagnosticKind::Lexical: return "lexical error";
        case DiagnosticKind::Syntax: return "syntax error";
        case DiagnosticKind::Semantic: return "semantic error";
    }
    return "error";
}

ParseError::ParseError(DiagnosticKind k, SourceSpan s, const std::string& msg)
    : Error("line " + std::to_string(s.line) + ", column " + std::to_string(s.column) + ": " + to_string(k) + ": " + msg),
      kind(k),
      span(s),
      message(msg) {}

namespace {

constexpr int kMaxDepth = 256;
constexpr int kMaxRange = 1000;
constexpr int kMaxDim = 16;
constexpr int kMaxPower = 64;
constexpr int kMaxIndexMagnitude = 1'000'000;
constexpr std::size_t kMaxTerms = 200'000;
constexpr std::size_t kMaxProductWork = 4'000'000;
constexpr std::uint64_t kMaxSteps = 5'000'000;
constexpr std::size_t kMaxIntDigits = 400;

const std::set<std::string, std::less<>> kKeywords = {
    "theory", "dim",    "coords", "field",     "ghost",  "constant",   "let",       "lagrangian",  "operator",
    "derivation", "certificate", "role", "params", "targets", "for", "sum", "d", "anti", "parity", "stage",
    "witness", "gauge", "noether", "even", "odd", "levi_civita", "kronecker", "minkowski", "antisymmetric"};

bool is_coordinate_name(std::string_view s) {
    if (s.size() < 2 || s[0] != 'x') return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Int, Punct, Newline, End };

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

[[noreturn]] void fail(DiagnosticKind k, const SourceSpan& s, const std::string& msg) { throw ParseError(k, s, msg); }

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;
    int depth = 0;
    auto span_at = [&](std::size_t begin, int l, int c) { return SourceSpan{l, c, begin, pos}; };
    while (pos < text.size()) {
        const char ch = text[pos];
        const std::size_t begin = pos;
        const int l = line;
        const int c = col;
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++pos;
            ++col;
        } else if (ch == '#') {
            while (pos < text.size() && text[pos] != '\n') ++pos;
            col += static_cast<int>(pos - begin);
        } else if (ch == '\n') {
            ++pos;
            if (depth == 0) out.push_back({Tok::Newline, "\n", span_at(begin, l, c)});
            ++line;
            col = 1;
        } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
            col += static_cast<int>(pos - begin);
            out.push_back({Tok::Ident, std::string(text.substr(begin, pos - begin)), span_at(begin, l, c)});
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            col += static_cast<int>(pos - begin);
            if (pos - begin > kMaxIntDigits) fail(DiagnosticKind::Lexical, span_at(begin, l, c), "integer literal too long");
            out.push_back({Tok::Int, std::string(text.substr(begin, pos - begin)), span_at(begin, l, c)});
        } else if (ch == '.') {
            if (pos + 1 < text.size() && text[pos + 1] == '.') {
                pos += 2;
                col += 2;
                out.push_back({Tok::Punct, "..", span_at(begin, l, c)});
            } else {
                ++pos;
                fail(DiagnosticKind::Lexical, span_at(begin, l, c), "stray '.' (ranges are written lo..hi)");
            }
        } else if (std::string_view("()[]{},;:=+-*/^|").find(ch) != std::string_view::npos) {
            ++pos;
            ++col;
            if (ch == '(' || ch == '[') ++depth;
            if ((ch == ')' || ch == ']') && depth > 0) --depth;
            out.push_back({Tok::Punct, std::string(1, ch), span_at(begin, l, c)});
        } else {
            ++pos;
            char buf[8];
            std::snprintf(buf, sizeof buf, "0x%02x", static_cast<unsigned>(static_cast<unsigned char>(ch)));
            fail(DiagnosticKind::Lexical, span_at(begin, l, c), std::string("unexpected byte ") + buf);
        }
    }
    out.push_back({Tok::End, "", SourceSpan{line, col, text.size(), text.size()}});
    return out;
}

// ---------------------------------------------------------------- syntax tree

struct IndexExpr {
    bool literal = true;
    int value = 0;
    std::string name;
    SourceSpan span;
};

struct Node;
using NodeP = std::shared_ptr<const Node>;

enum class NodeKind { Num, Ref, Anti, Sum, Product, Neg, Pow, Series, Deriv };

struct Node {
    NodeKind kind;
    SourceSpan span;
    Rational num;
    std::string name;
    bool bracket = false;
    std::vector<IndexExpr> comps;
    std::vector<IndexExpr> jets;
    std::vector<NodeP> kids;
    std::vector<char> ops;  // '+'/'-' for Sum, '*'/'/' for Product
    int exponent = 0;
    std::string bound;
    IndexExpr lo, hi;
};

struct LetDef {
    std::vector<std::string> params;
    NodeP body;
};

struct Binding {
    std::string name;
    IndexExpr lo, hi;
};

using Env = std::vector<std::pair<std::string, int>>;

// ---------------------------------------------------------------- parser

class Parser {
public:
    Parser(std::string_view text, Theory theory) : toks_(lex(text)), theory_(std::move(theory)) {}

    Theory parse_file();
    GradedPolynomial parse_lone_expression();
    LinearJetOperator parse_lone_operator();

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    Theory theory_;
    std::map<std::string, LetDef, std::less<>> lets_;
    std::map<std::string, GradedPolynomial> let_cache_;
    std::set<std::string> let_active_;
    int depth_ = 0;
    int eval_depth_ = 0;
    std::uint64_t steps_ = 0;
    bool have_theory_ = false;
    bool have_dim_ = false;
    bool have_lagrangian_ = false;

    // token helpers
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = toks_[i_];
        if (i_ + 1 < toks_.size()) ++i_;
        return t;
    }
    bool at_punct(std::string_view p, std::size_t k = 0) const { return peek(k).kind == Tok::Punct && peek(k).text == p; }
    bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
    bool accept(std::string_view p) {
        if (!at_punct(p)) return false;
        next();
        return true;
    }
    static std::string describe(const Token& t) {
        switch (t.kind) {
            case Tok::End: return "end of input";
            case Tok::Newline: return "end of line";
            default: return "'" + t.text + "'";
        }
    }
    [[noreturn]] void syntax(const std::string& expected) const {
        fail(DiagnosticKind::Syntax, peek().span, "expected " + expected + ", found " + describe(peek()));
    }
    void expect(std::string_view p) {
        if (!accept(p)) syntax("'" + std::string(p) + "'");
    }
    void expect_word(std::string_view w) {
        if (!at_word(w)) syntax("'" + std::string(w) + "'");
        next();
    }
    const Token& expect_ident(const std::string& what) {
        if (peek().kind != Tok::Ident) syntax(what);
        return next();
    }
    std::string expect_name(const std::string& what) {
        const Token& t = expect_ident(what);
        if (kKeywords.contains(t.text)) fail(DiagnosticKind::Syntax, t.span, "'" + t.text + "' is a reserved word");
        return t.text;
    }
    void skip_newlines() {
        while (peek().kind == Tok::Newline) next();
    }
    // A line starting with a binary operator continues the expression above.
    bool continues(std::string_view a, std::string_view b) {
        std::size_t k = 0;
        while (peek(k).kind == Tok::Newline) ++k;
        if (k == 0 || !(at_punct(a, k) || at_punct(b, k))) return false;
        skip_newlines();
        return true;
    }
    void end_statement() {
        if (peek().kind == Tok::End) return;
        if (peek().kind != Tok::Newline) syntax("end of line");
        next();
    }
    void end_entry() {
        if (at_punct("}")) return;
        if (peek().kind != Tok::Newline) syntax("end of line or '}'");
        next();
    }
    void require_dim(const Token& t) const {
        if (!have_dim_) fail(DiagnosticKind::Semantic, t.span, "'dim' must be declared before '" + t.text + "'");
    }

    int int_value(const Token& t) const {
        if (t.kind != Tok::Int) syntax("an integer");
        if (t.text.size() > 7 || std::stoi(t.text) > kMaxIndexMagnitude) {
            fail(DiagnosticKind::Semantic, t.span, "integer " + t.text + " is too large here");
        }
        return std::stoi(t.text);
    }
    int signed_int() {
        bool neg = accept("-");
        if (peek().kind != Tok::Int) syntax("an integer");
        int v = int_value(next());
        return neg ? -v : v;
    }

    // declarations
    void statement();
    void declare_name(const std::string& name, const SourceSpan& span) const;
    IndexRange range(bool allow_count);
    void variable_decl(VarKind base_kind);
    void constant_decl();
    Rational table_entry();
    void table_values(std::vector<Rational>& out);
    void let_decl();
    std::vector<Binding> for_prefix();
    void expand(const std::vector<Binding>& bindings, std::size_t k, Env& env, const std::function<void(Env&)>& body);
    LinearJetOperator operator_body();
    std::vector<VariableId> ref_list(Env& env);
    void derivation_decl();
    void certificate_decl();

    // expressions
    NodeP expression();
    NodeP term();
    NodeP unary();
    NodeP power();
    NodeP primary();
    NodeP reference(bool anti);
    IndexExpr index_expr();
    std::vector<IndexExpr> index_list(std::initializer_list<std::string_view> stops);
    void brackets(Node& n);

    // evaluation
    int index_value(const IndexExpr& e, const Env& env, bool jet) const;
    MultiIndex jet_of(const std::vector<IndexExpr>& jets, const Env& env) const;
    GradedPolynomial eval(const Node& n, Env& env);
    GradedPolynomial eval_ref(const Node& n, Env& env);
    VariableId variable_of(const Node& n, Env& env);
    GradedPolynomial multiply(const GradedPolynomial& a, const GradedPolynomial& b, const SourceSpan& s) const;
    void guard_size(const GradedPolynomial& p, const SourceSpan& s) const;
};

void Parser::declare_name(const std::string& name, const SourceSpan& span) const {
    if (is_coordinate_name(name)) fail(DiagnosticKind::Semantic, span, "'" + name + "' is reserved for a base coordinate");
    if (theory_.find_variable(name) || theory_.find_constant(name) || lets_.contains(name)) {
        fail(DiagnosticKind::Semantic, span, "'" + name + "' is already declared");
    }
}

Theory Parser::parse_file() {
    while (true) {
        skip_newlines();
        if (peek().kind == Tok::End) break;
        statement();
    }
    if (!have_theory_) fail(DiagnosticKind::Semantic, peek().span, "missing 'theory' statement");
    if (!have_dim_) fail(DiagnosticKind::Semantic, peek().span, "missing 'dim' statement");
    return std::move(theory_);
}

void Parser::statement() {
    const Token& kw = peek();
    if (kw.kind != Tok::Ident) syntax("a statement keyword");
    const std::string word = kw.text;
    const SourceSpan span = kw.span;
    next();
    if (word == "theory") {
        if (have_theory_) fail(DiagnosticKind::Semantic, span, "duplicate 'theory' statement");
        theory_.name = expect_name("a theory name");
        have_theory_ = true;
    } else if (word == "dim") {
        if (have_dim_) fail(DiagnosticKind::Semantic, span, "duplicate 'dim' statement");
        const Token& t = peek();
        int n = int_value(next());
        if (n < 1 || n > kMaxDim) fail(DiagnosticKind::Semantic, t.span, "dim must lie in 1.." + std::to_string(kMaxDim));
        theory_.dim = n;
        theory_.coords = default_coordinates(n);
        have_dim_ = true;
    } else if (word == "coords") {
        require_dim(kw);
        std::vector<std::string> names;
        do {
            const Token& t = peek();
            std::string name = expect_name("a coordinate name");
            if (std::find(names.begin(), names.end(), name) != names.end()) {
                fail(DiagnosticKind::Semantic, t.span, "duplicate coordinate '" + name + "'");
            }
            names.push_back(name);
        } while (accept(","));
        if (static_cast<int>(names.size()) != theory_.dim) {
            fail(DiagnosticKind::Semantic, span, "dim " + std::to_string(theory_.dim) + " needs exactly that many coordinate names");
        }
        theory_.coords = std::move(names);
    } else if (word == "field" || word == "ghost") {
        require_dim(kw);
        variable_decl(word == "field" ? VarKind::Field : VarKind::Ghost);
    } else if (word == "constant") {
        require_dim(kw);
        constant_decl();
    } else if (word == "let") {
        require_dim(kw);
        let_decl();
    } else if (word == "lagrangian") {
        require_dim(kw);
        if (have_lagrangian_) fail(DiagnosticKind::Semantic, span, "duplicate 'lagrangian' statement");
        NodeP e = expression();
        Env env;
        GradedPolynomial L = eval(*e, env);
        if (L.parity() != ParityClass::Even) {
            fail(DiagnosticKind::Semantic, e->span, std::string("the Lagrangian must be even, got ") + to_string(L.parity()));
        }
        theory_.lagrangian = std::move(L);
        have_lagrangian_ = true;
    } else if (word == "operator") {
        require_dim(kw);
        const Token& t = peek();
        std::string name = expect_ident("an operator name").text;
        if (theory_.operators.contains(name)) fail(DiagnosticKind::Semantic, t.span, "operator '" + name + "' already declared");
        theory_.operators.emplace(name, operator_body());
    } else if (word == "derivation") {
        require_dim(kw);
        derivation_decl();
        return;
    } else if (word == "certificate") {
        require_dim(kw);
        certificate_decl();
        return;
    } else {
        fail(DiagnosticKind::Syntax, span, "unknown statement '" + word + "'");
    }
    end_statement();
}

IndexRange Parser::range(bool allow_count) {
    IndexRange r;
    if (peek().kind == Tok::Ident) {
        const Token& t = peek();
        r.name = expect_name("an index name");
        if (is_coordinate_name(r.name)) fail(DiagnosticKind::Semantic, t.span, "'" + r.name + "' is reserved");
        expect("=");
    }
    const SourceSpan start = peek().span;
    int lo = signed_int();
    if (accept("..")) {
        r.lo = lo;
        r.hi = signed_int();
    } else {
        if (!allow_count || !r.name.empty()) syntax("'..'");
        r.lo = 0;
        r.hi = lo - 1;
    }
    if (r.hi < r.lo || r.size() > kMaxRange) {
        fail(DiagnosticKind::Semantic, start, "index range must be nonempty with at most " + std::to_string(kMaxRange) + " values");
    }
    return r;
}

void Parser::variable_decl(VarKind base_kind) {
    VariableDecl decl;
    const Token& nt = peek();
    decl.name = expect_name("a variable name");
    declare_name(decl.name, nt.span);
    decl.kind = base_kind;
    if (accept("[")) {
        do {
            decl.ranges.push_back(range(true));
        } while (accept(","));
        expect("]");
    }
    expect_word("parity");
    if (at_word("even")) {
        decl.parity = Parity::Even;
    } else if (at_word("odd")) {
        decl.parity = Parity::Odd;
    } else {
        syntax("'even' or 'odd'");
    }
    next();
    if (at_word("stage")) {
        const Token& st = next();
        if (base_kind != VarKind::Ghost) fail(DiagnosticKind::Semantic, st.span, "only ghosts carry a stage");
        const Token& kt = peek();
        int k = int_value(next());
        if (k > 64) fail(DiagnosticKind::Semantic, kt.span, "stage too large");
        if ((k % 2 == 1) != (decl.parity == Parity::Odd)) {
            fail(DiagnosticKind::Semantic, kt.span,
                 "stage-" + std::to_string(k) + " ghosts are " + (k % 2 == 1 ? "odd" : "even"));
        }
        decl.kind = VarKind::StageGhost;
        decl.stage = k;
    }
    std::size_t count = 1;
    for (const auto& r : decl.ranges) {
        count *= static_cast<std::size_t>(r.size());
        if (count > 100'000) fail(DiagnosticKind::Semantic, nt.span, "too many components");
    }
    theory_.variables.push_back(std::move(decl));
}

Rational Parser::table_entry() {
    bool neg = accept("-");
    if (peek().kind != Tok::Int) syntax("a rational number");
    Rational q(mpz_class(next().text));
    if (accept("/")) {
        if (peek().kind != Tok::Int) syntax("a denominator");
        const Token& t = next();
        mpz_class den(t.text);
        if (den == 0) fail(DiagnosticKind::Semantic, t.span, "zero denominator");
        q /= den;
    }
    q.canonicalize();
    return neg ? Rational(-q) : q;
}

void Parser::table_values(std::vector<Rational>& out) {
    expect("{");
    skip_newlines();
    if (accept("}")) return;
    while (true) {
        skip_newlines();
        if (++depth_ > kMaxDepth) fail(DiagnosticKind::Syntax, peek().span, "nesting too deep");
        if (at_punct("{")) {
            table_values(out);
        } else {
            out.push_back(table_entry());
            if (out.size() > 1'000'000) fail(DiagnosticKind::Semantic, peek().span, "table too large");
        }
        --depth_;
        skip_newlines();
        if (accept("}")) return;
        expect(",");
    }
}

namespace {

int permutation_sign(std::vector<int> p) {
    int sign = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            if (p[i] == p[j]) return 0;
            if (p[i] > p[j]) sign = -sign;
        }
    }
    return sign;
}

}  // namespace

void Parser::constant_decl() {
    const Token& nt = peek();
    std::string name = expect_name("a constant name");
    declare_name(name, nt.span);
    ConstantTensor c;
    if (accept("[")) {
        do {
            c.dims.push_back(range(true));
        } while (accept(","));
        expect("]");
    }
    std::size_t volume = 1;
    for (const auto& d : c.dims) {
        volume *= static_cast<std::size_t>(d.size());
        if (volume > 1'000'000) fail(DiagnosticKind::Semantic, nt.span, "table too large");
    }
    if (at_word("antisymmetric")) {
        const Token& t = next();
        if (c.dims.size() < 2 || c.dims[c.dims.size() - 1] .lo != c.dims[c.dims.size() - 2].lo ||
            c.dims[c.dims.size() - 1].hi != c.dims[c.dims.size() - 2].hi) {
            fail(DiagnosticKind::Semantic, t.span, "antisymmetric needs two trailing indices over the same range");
        }
        c.antisymmetric = true;
    }
    expect("=");
    const SourceSpan vspan = peek().span;
    if (at_punct("{")) {
        table_values(c.values);
        if (c.values.size() != volume) {
            fail(DiagnosticKind::Semantic, vspan,
                 "table of " + name + " has " + std::to_string(c.values.size()) + " entries, expected " + std::to_string(volume));
        }
    } else {
        const Token& g = expect_ident("a table or levi_civita/kronecker/minkowski");
        const std::string gen = g.text;
        expect("(");
        int k = int_value(next());
        expect(")");
        auto require_shape = [&](std::size_t rank) {
            if (c.dims.size() != rank) fail(DiagnosticKind::Semantic, g.span, gen + " needs " + std::to_string(rank) + " indices");
            for (const auto& d : c.dims) {
                if (d.size() != k) fail(DiagnosticKind::Semantic, g.span, gen + "(" + std::to_string(k) + ") needs ranges of size " + std::to_string(k));
            }
        };
        if (gen == "levi_civita") {
            if (k < 1 || k > 8) fail(DiagnosticKind::Semantic, g.span, "levi_civita order must lie in 1..8");
            require_shape(static_cast<std::size_t>(k));
        } else if (gen == "kronecker" || gen == "minkowski") {
            if (k < 1) fail(DiagnosticKind::Semantic, g.span, gen + " needs a positive size");
            require_shape(2);
        } else {
            fail(DiagnosticKind::Syntax, g.span, "unknown table generator '" + gen + "'");
        }
        c.values.resize(volume);
        std::vector<int> pos(c.dims.size(), 0);
        for (std::size_t flat = 0; flat < volume; ++flat) {
            std::size_t rem = flat;
            for (std::size_t d = c.dims.size(); d-- > 0;) {
                pos[d] = static_cast<int>(rem % static_cast<std::size_t>(c.dims[d].size()));
                rem /= static_cast<std::size_t>(c.dims[d].size());
            }
            if (gen == "levi_civita") {
                c.values[flat] = permutation_sign(pos);
            } else if (gen == "kronecker") {
                c.values[flat] = pos[0] == pos[1] ? 1 : 0;
            } else {
                c.values[flat] = pos[0] != pos[1] ? 0 : (pos[0] == 0 ? 1 : -1);
            }
        }
    }
    if (c.antisymmetric) {
        const std::size_t m = static_cast<std::size_t>(c.dims.back().size());
        for (std::size_t flat = 0; flat < volume; ++flat) {
            std::size_t j = flat % m;
            std::size_t i = (flat / m) % m;
            std::size_t swapped = flat - i * m - j + j * m + i;
            if (c.values[flat] != -c.values[swapped]) {
                fail(DiagnosticKind::Semantic, vspan, "table of " + name + " is not antisymmetric in its last two indices");
            }
        }
    }
    theory_.constants.emplace_back(std::move(name), std::move(c));
}

void Parser::let_decl() {
    const Token& nt = peek();
    std::string name = expect_name("a macro name");
    declare_name(name, nt.span);
    LetDef def;
    if (accept("[")) {
        do {
            const Token& pt = peek();
            std::string p = expect_name("a parameter name");
            if (std::find(def.params.begin(), def.params.end(), p) != def.params.end()) {
                fail(DiagnosticKind::Semantic, pt.span, "duplicate parameter '" + p + "'");
            }
            def.params.push_back(std::move(p));
        } while (accept(","));
        expect("]");
    }
    expect("=");
    def.body = expression();
    lets_.emplace(std::move(name), std::move(def));
}

std::vector<Binding> Parser::for_prefix() {
    std::vector<Binding> out;
    if (!at_word("for")) return out;
    next();
    do {
        Binding b;
        b.name = expect_name("an index name");
        expect("=");
        b.lo = index_expr();
        expect("..");
        b.hi = index_expr();
        out.push_back(std::move(b));
    } while (accept(","));
    expect(":");
    return out;
}

void Parser::expand(const std::vector<Binding>& bindings, std::size_t k, Env& env, const std::function<void(Env&)>& body) {
    if (k == bindings.size()) {
        body(env);
        return;
    }
    const Binding& b = bindings[k];
    int lo = index_value(b.lo, env, false);
    int hi = index_value(b.hi, env, false);
    if (hi - lo + 1 > kMaxRange) fail(DiagnosticKind::Semantic, b.lo.span, "range too large");
    for (int v = lo; v <= hi; ++v) {
        env.emplace_back(b.name, v);
        expand(bindings, k + 1, env, body);
        env.pop_back();
    }
}

std::vector<VariableId> Parser::ref_list(Env& env) {
    std::vector<VariableId> out;
    expect("(");
    if (accept(")")) return out;
    do {
        NodeP r = reference(false);
        out.push_back(variable_of(*r, env));
    } while (accept(","));
    expect(")");
    return out;
}

LinearJetOperator Parser::operator_body() {
    expect_word("role");
    OperatorRole role;
    if (at_word("gauge")) {
        role = OperatorRole::Gauge;
    } else if (at_word("noether")) {
        role = OperatorRole::Noether;
    } else {
        syntax("'gauge' or 'noether'");
    }
    next();
    Env env;
    std::vector<VariableId> params, targets;
    if (at_word("params")) {
        next();
        params = ref_list(env);
    }
    if (at_word("targets")) {
        next();
        targets = ref_list(env);
    }
    LinearJetOperator op(role, params, targets);
    expect("{");
    while (true) {
        skip_newlines();
        if (accept("}")) break;
        const SourceSpan espan = peek().span;
        auto bindings = for_prefix();
        NodeP p = reference(false);
        expect("|");
        NodeP t = reference(false);
        expect("|");
        Node jets;
        expect("[");
        jets.jets = index_list({"]"});
        expect("]");
        expect(":");
        NodeP coef = expression();
        end_entry();
        expand(bindings, 0, env, [&](Env& e) {
            VariableId pv = variable_of(*p, e);
            VariableId tv = variable_of(*t, e);
            MultiIndex jet = jet_of(jets.jets, e);
            GradedPolynomial c = eval(*coef, e);
            try {
                op.add(pv, tv, jet, c);
            } catch (const ParseError&) {
                throw;
            } catch (const Error& err) {
                fail(DiagnosticKind::Semantic, espan, err.what());
            }
        });
    }
    try {
        validate_coefficients(op);
    } catch (const DomainError& err) {
        fail(DiagnosticKind::Semantic, peek().span, err.what());
    }
    return op;
}

void Parser::derivation_decl() {
    const Token& nt = peek();
    std::string name = expect_ident("a derivation name").text;
    if (theory_.derivations.contains(name)) fail(DiagnosticKind::Semantic, nt.span, "derivation '" + name + "' already declared");
    GeneralizedVectorField field;
    expect("{");
    Env env;
    while (true) {
        skip_newlines();
        if (accept("}")) break;
        auto bindings = for_prefix();
        NodeP target = at_word("anti") ? (next(), reference(true)) : reference(false);
        expect(":");
        NodeP e = expression();
        end_entry();
        expand(bindings, 0, env, [&](Env& en) {
            VariableId v = variable_of(*target, en);
            field.components[v] += eval(*e, en);
        });
    }
    for (auto it = field.components.begin(); it != field.components.end();) {
        it = it->second.is_zero() ? field.components.erase(it) : std::next(it);
    }
    theory_.derivations.emplace(std::move(name), std::move(field));
    end_statement();
}

void Parser::certificate_decl() {
    const Token& nt = peek();
    std::string label = expect_ident("a certificate label").text;
    if (theory_.certificates.contains(label)) fail(DiagnosticKind::Semantic, nt.span, "certificate '" + label + "' already declared");
    ReductionCertificate cert;
    expect("{");
    Env env;
    while (true) {
        skip_newlines();
        if (accept("}")) break;
        if (at_word("witness")) {
            next();
            expect(":");
            NodeP e = expression();
            end_entry();
            GradedPolynomial w = eval(*e, env);
            cert.kt_witness = cert.kt_witness ? *cert.kt_witness + w : w;
            continue;
        }
        auto bindings = for_prefix();
        expect("(");
        NodeP target = reference(false);
        expect(",");
        Node jets;
        expect("[");
        jets.jets = index_list({"]"});
        expect("]");
        expect(")");
        expect(":");
        NodeP e = expression();
        end_entry();
        expand(bindings, 0, env, [&](Env& en) {
            auto key = std::make_pair(variable_of(*target, en), jet_of(jets.jets, en));
            auto& slot = cert.coefficients[key];
            slot += eval(*e, en);
            if (slot.is_zero()) cert.coefficients.erase(key);
        });
    }
    theory_.certificates.emplace(std::move(label), std::move(cert));
    end_statement();
}

// ---------------------------------------------------------------- expression syntax

IndexExpr Parser::index_expr() {
    IndexExpr e;
    e.span = peek().span;
    if (peek().kind == Tok::Ident) {
        e.literal = false;
        e.name = next().text;
        return e;
    }
    e.value = signed_int();
    return e;
}

std::vector<IndexExpr> Parser::index_list(std::initializer_list<std::string_view> stops) {
    std::vector<IndexExpr> out;
    for (auto s : stops) {
        if (at_punct(s)) return out;
    }
    do {
        out.push_back(index_expr());
        if (out.size() > 64) fail(DiagnosticKind::Semantic, peek().span, "too many indices");
    } while (accept(","));
    return out;
}

void Parser::brackets(Node& n) {
    if (!accept("[")) return;
    n.bracket = true;
    n.comps = index_list({";", "]"});
    if (accept(";")) n.jets = index_list({"]"});
    expect("]");
}

NodeP Parser::reference(bool anti) {
    auto n = std::make_shared<Node>();
    n->kind = anti ? NodeKind::Anti : NodeKind::Ref;
    n->span = peek().span;
    if (anti) {
        expect("(");
        n->name = expect_ident("a variable name").text;
        expect(")");
    } else {
        n->name = expect_ident("a variable reference").text;
    }
    brackets(*n);
    n->span.end = toks_[i_ > 0 ? i_ - 1 : 0].span.end;
    return n;
}

NodeP Parser::expression() {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Sum;
    n->span = peek().span;
    n->kids.push_back(term());
    n->ops.push_back('+');
    while (at_punct("+") || at_punct("-") || continues("+", "-")) {
        n->ops.push_back(next().text[0]);
        skip_newlines();
        n->kids.push_back(term());
    }
    n->span.end = toks_[i_ > 0 ? i_ - 1 : 0].span.end;
    return n->kids.size() == 1 ? n->kids.front() : n;
}

NodeP Parser::term() {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Product;
    n->span = peek().span;
    n->kids.push_back(unary());
    n->ops.push_back('*');
    while (at_punct("*") || at_punct("/") || continues("*", "/")) {
        n->ops.push_back(next().text[0]);
        skip_newlines();
        n->kids.push_back(unary());
    }
    n->span.end = toks_[i_ > 0 ? i_ - 1 : 0].span.end;
    return n->kids.size() == 1 ? n->kids.front() : n;
}

NodeP Parser::unary() {
    if (++depth_ > kMaxDepth) fail(DiagnosticKind::Syntax, peek().span, "expression nested too deeply");
    NodeP out;
    if (at_punct("-") || at_punct("+")) {
        const Token& t = next();
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Neg;
        n->span = t.span;
        NodeP inner = unary();
        if (t.text == "+") {
            out = inner;
        } else {
            n->kids.push_back(std::move(inner));
            out = n;
        }
    } else {
        out = power();
    }
    --depth_;
    return out;
}

NodeP Parser::power() {
    NodeP base = primary();
    if (!at_punct("^")) return base;
    const Token& caret = next();
    if (peek().kind != Tok::Int) syntax("an integer exponent");
    const Token& et = next();
    if (et.text.size() > 3 || std::stoi(et.text) > kMaxPower) {
        fail(DiagnosticKind::Semantic, et.span, "exponent larger than " + std::to_string(kMaxPower));
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Pow;
    n->span = caret.span;
    n->exponent = std::stoi(et.text);
    n->kids.push_back(std::move(base));
    if (at_punct("^")) fail(DiagnosticKind::Syntax, peek().span, "chained '^' needs parentheses");
    return n;
}

NodeP Parser::primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Num;
        n->span = t.span;
        n->num = Rational(mpz_class(t.text));
        next();
        return n;
    }
    if (at_punct("(")) {
        next();
        if (++depth_ > kMaxDepth) fail(DiagnosticKind::Syntax, t.span, "expression nested too deeply");
        NodeP inner = expression();
        --depth_;
        expect(")");
        return inner;
    }
    if (t.kind != Tok::Ident) syntax("an expression");
    if (t.text == "sum" && at_punct("(", 1)) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Series;
        n->span = t.span;
        next();
        next();
        n->bound = expect_name("a summation index");
        expect(",");
        n->lo = index_expr();
        expect("..");
        n->hi = index_expr();
        expect(",");
        n->kids.push_back(expression());
        expect(")");
        return n;
    }
    if (t.text == "d" && at_punct("(", 1)) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Deriv;
        n->span = t.span;
        next();
        next();
        n->kids.push_back(expression());
        expect(";");
        n->jets = index_list({")"});
        expect(")");
        return n;
    }
    if (t.text == "anti" && at_punct("(", 1)) {
        next();
        return reference(true);
    }
    if (kKeywords.contains(t.text)) fail(DiagnosticKind::Syntax, t.span, "unexpected keyword '" + t.text + "'");
    return reference(false);
}

// ---------------------------------------------------------------- evaluation

int Parser::index_value(const IndexExpr& e, const Env& env, bool jet) const {
    if (e.literal) return e.value;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == e.name) return it->second;
    }
    if (jet) {
        auto c = std::find(theory_.coords.begin(), theory_.coords.end(), e.name);
        if (c != theory_.coords.end()) return static_cast<int>(c - theory_.coords.begin());
        // x0.. always names a base direction, whatever the coordinate labels.
        if (e.name.size() > 1 && e.name[0] == 'x' &&
            std::all_of(e.name.begin() + 1, e.name.end(), [](char ch) { return ch >= '0' && ch <= '9'; }) &&
            e.name.size() < 5) {
            int k = std::stoi(e.name.substr(1));
            if (k < theory_.dim) return k;
        }
    }
    fail(DiagnosticKind::Semantic, e.span, std::string("undeclared ") + (jet ? "direction or index" : "index") + " '" + e.name + "'");
}

MultiIndex Parser::jet_of(const std::vector<IndexExpr>& jets, const Env& env) const {
    std::vector<int> dirs;
    for (const auto& j : jets) {
        int d = index_value(j, env, true);
        if (d < 0 || d >= theory_.dim) {
            fail(DiagnosticKind::Semantic, j.span, "direction " + std::to_string(d) + " outside 0.." + std::to_string(theory_.dim - 1));
        }
        dirs.push_back(d);
    }
    if (static_cast<int>(dirs.size()) > max_jet_order()) {
        fail(DiagnosticKind::Semantic, jets.front().span,
             "jet order " + std::to_string(dirs.size()) + " exceeds the maximum " + std::to_string(max_jet_order()));
    }
    return MultiIndex(std::span<const int>(dirs));
}

void Parser::guard_size(const GradedPolynomial& p, const SourceSpan& s) const {
    if (p.size() > kMaxTerms) fail(DiagnosticKind::Semantic, s, "expression expands to more than " + std::to_string(kMaxTerms) + " terms");
}

GradedPolynomial Parser::multiply(const GradedPolynomial& a, const GradedPolynomial& b, const SourceSpan& s) const {
    if (a.size() * b.size() > kMaxProductWork) fail(DiagnosticKind::Semantic, s, "product too large to expand");
    GradedPolynomial out = a * b;
    guard_size(out, s);
    return out;
}

VariableId Parser::variable_of(const Node& n, Env& env) {
    const VariableDecl* decl = theory_.find_variable(n.name);
    if (!decl) fail(DiagnosticKind::Semantic, n.span, "undeclared variable '" + n.name + "'");
    if (!n.jets.empty()) fail(DiagnosticKind::Semantic, n.span, "a jet index is not allowed here");
    std::vector<int> comps;
    for (const auto& c : n.comps) comps.push_back(index_value(c, env, false));
    VariableId v = [&] {
        try {
            return decl->id(comps);
        } catch (const DomainError& e) {
            fail(DiagnosticKind::Semantic, n.span, e.what());
        }
    }();
    return n.kind == NodeKind::Anti ? anti_of(v) : v;
}

GradedPolynomial Parser::eval_ref(const Node& n, Env& env) {
    if (n.kind == NodeKind::Ref && !n.bracket) {
        for (auto it = env.rbegin(); it != env.rend(); ++it) {
            if (it->first == n.name) return GradedPolynomial::constant(it->second);
        }
    }
    if (n.kind == NodeKind::Ref) {
        if (auto let = lets_.find(n.name); let != lets_.end()) {
            if (!n.jets.empty()) fail(DiagnosticKind::Semantic, n.span, "macros take no jet indices; use d(...)");
            if (n.comps.size() != let->second.params.size()) {
                fail(DiagnosticKind::Semantic, n.span,
                     "'" + n.name + "' takes " + std::to_string(let->second.params.size()) + " indices");
            }
            Env inner;
            std::string key = n.name;
            for (std::size_t k = 0; k < n.comps.size(); ++k) {
                int v = index_value(n.comps[k], env, false);
                inner.emplace_back(let->second.params[k], v);
                key += "," + std::to_string(v);
            }
            if (auto hit = let_cache_.find(key); hit != let_cache_.end()) return hit->second;
            if (!let_active_.insert(n.name).second) fail(DiagnosticKind::Semantic, n.span, "'" + n.name + "' refers to itself");
            GradedPolynomial value = eval(*let->second.body, inner);
            let_active_.erase(n.name);
            let_cache_.emplace(key, value);
            return value;
        }
        if (const ConstantTensor* c = theory_.find_constant(n.name)) {
            if (!n.jets.empty()) fail(DiagnosticKind::Semantic, n.span, "constants take no jet indices");
            std::vector<int> idx;
            for (const auto& e : n.comps) idx.push_back(index_value(e, env, false));
            auto value = c->at(idx);
            if (!value) fail(DiagnosticKind::Semantic, n.span, "index out of range for constant '" + n.name + "'");
            return GradedPolynomial::constant(*value);
        }
        if (!theory_.find_variable(n.name)) {
            if (is_coordinate_name(n.name) && !n.bracket) {
                if (n.name.size() > 3 || std::stoi(n.name.substr(1)) >= theory_.dim) {
                    fail(DiagnosticKind::Semantic, n.span, "base coordinate '" + n.name + "' outside dim " + std::to_string(theory_.dim));
                }
                return GradedPolynomial::coordinate(std::stoi(n.name.substr(1)));
            }
            fail(DiagnosticKind::Semantic, n.span, "undeclared symbol '" + n.name + "'");
        }
    }
    const VariableDecl* decl = theory_.find_variable(n.name);
    if (!decl) fail(DiagnosticKind::Semantic, n.span, "undeclared variable '" + n.name + "'");
    std::vector<int> comps;
    for (const auto& c : n.comps) comps.push_back(index_value(c, env, false));
    try {
        VariableId v = decl->id(comps);
        if (n.kind == NodeKind::Anti) v = anti_of(v);
        return GradedPolynomial::variable(make_jet(v, jet_of(n.jets, env)));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(DiagnosticKind::Semantic, n.span, e.what());
    }
}

GradedPolynomial Parser::eval(const Node& n, Env& env) {
    if (++steps_ > kMaxSteps) fail(DiagnosticKind::Semantic, n.span, "expression evaluation budget exhausted");
    if (++eval_depth_ > 4 * kMaxDepth) fail(DiagnosticKind::Semantic, n.span, "macro expansion nested too deeply");
    struct Leave {
        int& d;
        ~Leave() { --d; }
    } leave{eval_depth_};

    switch (n.kind) {
        case NodeKind::Num: return GradedPolynomial::constant(n.num);
        case NodeKind::Ref:
        case NodeKind::Anti: return eval_ref(n, env);
        case NodeKind::Neg: return -eval(*n.kids[0], env);
        case NodeKind::Sum: {
            GradedPolynomial out;
            for (std::size_t k = 0; k < n.kids.size(); ++k) {
                GradedPolynomial t = eval(*n.kids[k], env);
                if (n.ops[k] == '-') {
                    out -= t;
                } else {
                    out += t;
                }
                guard_size(out, n.span);
            }
            return out;
        }
        case NodeKind::Product: {
            GradedPolynomial out = eval(*n.kids[0], env);
            for (std::size_t k = 1; k < n.kids.size(); ++k) {
                GradedPolynomial f = eval(*n.kids[k], env);
                if (n.ops[k] == '/') {
                    if (!f.is_constant() || f.is_zero()) {
                        fail(DiagnosticKind::Semantic, n.kids[k]->span, "division only by a nonzero constant");
                    }
                    out *= Rational(1) / f.constant_term();
                } else {
                    out = multiply(out, f, n.kids[k]->span);
                }
            }
            return out;
        }
        case NodeKind::Pow: {
            GradedPolynomial base = eval(*n.kids[0], env);
            GradedPolynomial out = GradedPolynomial::constant(1);
            for (int k = 0; k < n.exponent; ++k) out = multiply(out, base, n.span);
            return out;
        }
        case NodeKind::Series: {
            int lo = index_value(n.lo, env, false);
            int hi = index_value(n.hi, env, false);
            if (hi - lo + 1 > kMaxRange) fail(DiagnosticKind::Semantic, n.lo.span, "summation range too large");
            GradedPolynomial out;
            for (int v = lo; v <= hi; ++v) {
                env.emplace_back(n.bound, v);
                out += eval(*n.kids[0], env);
                env.pop_back();
                guard_size(out, n.span);
            }
            return out;
        }
        case NodeKind::Deriv: {
            GradedPolynomial out = eval(*n.kids[0], env);
            MultiIndex dirs = jet_of(n.jets, env);
            try {
                for (int d : dirs.entries()) {
                    out = total_derivative(out, d);
                    guard_size(out, n.span);
                }
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                fail(DiagnosticKind::Semantic, n.span, e.what());
            }
            return out;
        }
    }
    return {};
}

GradedPolynomial Parser::parse_lone_expression() {
    skip_newlines();
    NodeP e = expression();
    skip_newlines();
    if (peek().kind != Tok::End) syntax("end of expression");
    Env env;
    return eval(*e, env);
}

LinearJetOperator Parser::parse_lone_operator() {
    skip_newlines();
    if (at_word("operator")) {
        next();
        expect_ident("an operator name");
    }
    LinearJetOperator op = operator_body();
    skip_newlines();
    if (peek().kind != Tok::End) syntax("end of input");
    return op;
}

// ---------------------------------------------------------------- rendering

std::string render_range(const IndexRange& r) {
    std::string out = r.name.empty() ? "" : r.name + "=";
    return out + std::to_string(r.lo) + ".." + std::to_string(r.hi);
}

std::string render_jet(const MultiIndex& m, const RenderOptions& opts) {
    std::string out = "[";
    for (int k = 0; k < m.order(); ++k) {
        if (k > 0) out += ',';
        auto d = static_cast<std::size_t>(m[k]);
        out += d < opts.coord_names.size() ? opts.coord_names[d] : std::to_string(d);
    }
    return out + "]";
}

std::string render_ids(const std::vector<VariableId>& ids, const RenderOptions& opts) {
    std::string out = "(";
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k > 0) out += ",";
        out += render_variable(ids[k], opts);
    }
    return out + ")";
}

}  // namespace

Theory parse_theory(std::string_view text) { return Parser(text, Theory{}).parse_file(); }

GradedPolynomial parse_expression(std::string_view text, const Theory& theory) {
    return Parser(text, theory).parse_lone_expression();
}

LinearJetOperator parse_operator(std::string_view text, const Theory& theory) {
    return Parser(text, theory).parse_lone_operator();
}

std::string render(const LinearJetOperator& op, const RenderOptions& opts) {
    std::string out = std::string("role ") + to_string(op.role()) + " params" + render_ids(op.params(), opts) + " targets" +
                      render_ids(op.targets(), opts) + " {\n";
    for (const auto& [key, coeff] : op.coeffs()) {
        out += "  " + render_variable(key.param, opts) + " | " + render_variable(key.target, opts) + " | " +
               render_jet(key.jet, opts) + " : " + render(coeff, opts) + "\n";
    }
    return out + "}";
}

std::string render(const Theory& t) {
    const RenderOptions opts = t.render_options();
    std::string out = "theory " + t.name + "\ndim " + std::to_string(t.dim) + "\ncoords ";
    for (std::size_t k = 0; k < t.coords.size(); ++k) out += (k > 0 ? "," : "") + t.coords[k];
    out += "\n";
    for (const auto& v : t.variables) {
        out += v.kind == VarKind::Field ? "field " : "ghost ";
        out += v.name;
        if (!v.ranges.empty()) {
            out += "[";
            for (std::size_t k = 0; k < v.ranges.size(); ++k) out += (k > 0 ? "," : "") + render_range(v.ranges[k]);
            out += "]";
        }
        out += std::string(" parity ") + to_string(v.parity);
        if (v.kind == VarKind::StageGhost) out += " stage " + std::to_string(v.stage);
        out += "\n";
    }
    for (const auto& [name, c] : t.constants) {
        out += "constant " + name;
        if (!c.dims.empty()) {
            out += "[";
            for (std::size_t k = 0; k < c.dims.size(); ++k) out += (k > 0 ? "," : "") + render_range(c.dims[k]);
            out += "]";
        }
        if (c.antisymmetric) out += " antisymmetric";
        out += " = {";
        for (std::size_t k = 0; k < c.values.size(); ++k) out += (k > 0 ? "," : "") + render_rational(c.values[k]);
        out += "}\n";
    }
    out += "lagrangian " + render(t.lagrangian, opts) + "\n";
    for (const auto& [name, op] : t.operators) out += "operator " + name + " " + render(op, opts) + "\n";
    for (const auto& [name, field] : t.derivations) {
        out += "derivation " + name + " {\n";
        for (const auto& [v, c] : field.components) out += "  " + render_variable(v, opts) + " : " + render(c, opts) + "\n";
        out += "}\n";
    }
    for (const auto& [label, cert] : t.certificates) {
        out += "certificate " + label + " {\n";
        for (const auto& [key, c] : cert.coefficients) {
            out += "  (" + render_variable(key.first, opts) + ", " + render_jet(key.second, opts) + ") : " + render(c, opts) + "\n";
        }
        if (cert.kt_witness) out += "  witness : " + render(*cert.kt_witness, opts) + "\n";
        out += "}\n";
    }
    return out;
}

}  // namespace nkt
