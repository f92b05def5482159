#include "nkt/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nkt/derivations.hpp"
#include "nkt/jet_calculus.hpp"
#include "nkt/koszul_tate.hpp"
#include "nkt/selftest.hpp"
#include "nkt/theory_dsl.hpp"

namespace nkt::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string file;
    std::string op;
    std::string sym;
    std::string expr;
    bool json = false;
    bool timing = false;
    bool stages = false;
    std::uint64_t seed = 1;
    int count = 50;
};

struct Outcome {
    VerificationReport report;
    std::vector<std::pair<std::string, std::string>> results;  // (where, rendered text)
    bool report_only_results = false;                          // el, eta, kt print just their results
};

/// Input problems that map to exit status 2.
struct UsageError : Error {
    using Error::Error;
};

Theory load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_theory(buf.str());
    } catch (const ParseError& e) {
        throw UsageError(path + ":" + std::to_string(e.span.line) + ":" + std::to_string(e.span.column) + ": " +
                         to_string(e.kind) + ": " + e.message);
    }
}

const LinearJetOperator& find_operator(const Theory& t, const std::string& name) {
    auto it = t.operators.find(name);
    if (it != t.operators.end()) return it->second;
    std::string known;
    for (const auto& [n, op] : t.operators) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown operator '" + name + "'" + (known.empty() ? std::string(" (none declared)") : "; declared: " + known));
}

bool params_all(const LinearJetOperator& op, VarKind kind) {
    if (op.params().empty()) return false;
    for (auto p : op.params()) {
        if (p.kind() != kind) return false;
    }
    return true;
}

// The Noether operator of the antighost sector: --op, or the unique Noether-role operator
// whose parameters are ordinary ghosts.
std::string noether_name(const Theory& t, const std::string& requested, bool required) {
    if (!requested.empty()) {
        if (find_operator(t, requested).role() != OperatorRole::Noether) {
            throw UsageError("operator '" + requested + "' does not have the noether role");
        }
        return requested;
    }
    std::vector<std::string> found;
    for (const auto& [n, op] : t.operators) {
        if (op.role() == OperatorRole::Noether && params_all(op, VarKind::Ghost)) found.push_back(n);
    }
    if (found.size() == 1) return found.front();
    if (!required && found.empty()) return "";
    throw UsageError(found.empty() ? "no Noether operator over ghosts is declared"
                                   : "several Noether operators are declared; choose one with --op");
}

AntifieldContext context(const Theory& t, const std::string& op_name, bool with_stages) {
    AntifieldContext ctx(t.lagrangian);
    if (!op_name.empty()) ctx.set_noether(t.operators.at(op_name));
    if (!with_stages) return ctx;
    for (const auto& [n, op] : t.operators) {
        if (op.role() != OperatorRole::Noether || !params_all(op, VarKind::StageGhost)) continue;
        const int k = op.params().front().stage();
        for (auto p : op.params()) {
            if (p.stage() != k) throw UsageError("operator '" + n + "' mixes ghosts of different stages");
        }
        if (ctx.stages().contains(k)) throw UsageError("two operators declared for stage " + std::to_string(k));
        ctx.set_stage(k, op);
    }
    return ctx;
}

Outcome cmd_el(const Theory& t) {
    Outcome o;
    o.report.check = "el";
    o.report_only_results = true;
    std::vector<VariableId> fields;
    for (const auto& d : t.variables) {
        if (d.kind != VarKind::Field) continue;
        for (auto v : d.all()) fields.push_back(v);
    }
    const auto opts = t.render_options();
    for (const auto& [v, e] : euler_lagrange(t.lagrangian, fields)) {
        o.results.emplace_back("E_" + render_variable(v, opts), render(e, opts));
    }
    o.report.settle();
    return o;
}

Outcome cmd_eta(const Theory& t, const Options& opt) {
    Outcome o;
    o.report.check = "eta";
    o.report.target = opt.op;
    o.report_only_results = true;
    o.results.emplace_back("eta(" + opt.op + ")", render(eta(find_operator(t, opt.op)), t.render_options()));
    o.report.settle();
    return o;
}

Outcome derived(const Theory& t, const std::string& check, const std::string& name, bool from_gauge) {
    const LinearJetOperator& op = find_operator(t, name);
    Outcome o;
    try {
        DerivedOperator d = from_gauge ? derive_noether_from_gauge(op, t.lagrangian) : derive_gauge_from_noether(op, t.lagrangian);
        o.report = std::move(d.report);
        o.results.emplace_back(from_gauge ? "Delta" : "upsilon", render(d.op, t.render_options()));
    } catch (const PreconditionFailed& e) {
        o.report = e.report;
        o.report.notes.push_back(e.what());
        o.report.pass = false;
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    o.report.check = check;
    o.report.target = name;
    return o;
}

Outcome cmd_check_noether(const Theory& t, const Options& opt) {
    const LinearJetOperator& op = find_operator(t, opt.op);
    if (op.role() != OperatorRole::Noether) throw UsageError("operator '" + opt.op + "' does not have the noether role");
    Outcome o;
    o.report = check_noether_identity(op, t.lagrangian);
    o.report.target = opt.op;
    return o;
}

GeneralizedVectorField symmetry(const Theory& t, const std::string& name) {
    if (auto it = t.derivations.find(name); it != t.derivations.end()) return it->second;
    if (auto it = t.operators.find(name); it != t.operators.end()) {
        if (it->second.role() != OperatorRole::Gauge) throw UsageError("'" + name + "' is a noether-role operator, not a symmetry");
        return to_vector_field(it->second);
    }
    throw UsageError("unknown derivation or gauge operator '" + name + "'");
}

Outcome cmd_check_variational(const Theory& t, const Options& opt) {
    Outcome o;
    o.report = check_variational(symmetry(t, opt.sym), t.lagrangian);
    o.report.check = "check-variational";
    o.report.target = opt.sym;
    return o;
}

Outcome cmd_check_nilpotent(const Theory& t, const Options& opt) {
    Outcome o;
    o.report.check = "check-nilpotent";
    o.report.target = opt.sym;
    const GeneralizedVectorField v = symmetry(t, opt.sym);
    try {
        NilpotencyReport n = check_nilpotent(v);
        for (auto& [var, r] : n.residuals) o.report.residuals.push_back({"s(" + render_variable(var) + ")", std::move(r)});
        o.report.settle();
        o.report.notes.push_back(o.report.pass ? "nilpotent" : "not nilpotent");
    } catch (const ParityError& e) {
        o.report.notes.push_back(e.what());
        o.report.settle(false);
    }
    return o;
}

Outcome cmd_kt(const Theory& t, const Options& opt) {
    GradedPolynomial p;
    try {
        p = parse_expression(opt.expr, t);
    } catch (const ParseError& e) {
        throw UsageError("--expr, column " + std::to_string(e.span.column) + ": " + to_string(e.kind) + ": " + e.message);
    }
    const bool extended = opt.stages || !opt.op.empty() || p.mentions_kind(VarKind::Antighost);
    AntifieldContext ctx = context(t, extended ? noether_name(t, opt.op, !opt.stages) : "", opt.stages);
    GradedPolynomial image;
    try {
        image = opt.stages ? kt_stage_apply(p, ctx) : extended ? kt_extended_apply(p, ctx) : kt_apply(p, ctx);
    } catch (const UndeclaredError& e) {
        throw UsageError(e.what());
    }
    Outcome o;
    o.report.check = "kt";
    o.report.target = opt.expr;
    o.report_only_results = true;
    const auto opts = t.render_options();
    o.results.emplace_back("kt(" + render(p, opts) + ")", render(image, opts));
    o.report.settle();
    return o;
}

Outcome cmd_check_reducibility(const Theory& t, const Options& opt) {
    const std::string name = noether_name(t, opt.op, true);
    AntifieldContext ctx = context(t, name, true);
    Outcome o;
    try {
        o.report = check_reducibility_chain(ctx, t.certificates);
    } catch (const CertificateError& e) {
        o.report.notes.push_back(e.what());
        o.report.settle(false);
    }
    o.report.check = "check-reducibility";
    o.report.target = name;
    return o;
}

Outcome cmd_selftest(const Options& opt) {
    Outcome o;
    o.report = run_selftest(opt.seed, opt.count);
    return o;
}

void emit_json(const Outcome& o, const RenderOptions& opts, std::ostream& out) {
    const VerificationReport& r = o.report;
    json j;
    j["check"] = r.check;
    j["theory"] = r.theory;
    j["target"] = r.target;
    j["pass"] = r.pass;
    j["residuals"] = json::array();
    for (const auto& e : r.residuals) j["residuals"].push_back({{"where", e.where}, {"expr", render(e.expr, opts)}});
    j["assumptions"] = r.assumptions;
    j["certificates"] = json::array();
    for (const auto& c : r.certificates) j["certificates"].push_back({{"label", c.label}, {"verified", c.verified}});
    j["notes"] = r.notes;
    if (!o.results.empty()) {
        j["results"] = json::array();
        for (const auto& [where, text] : o.results) j["results"].push_back({{"where", where}, {"expr", text}});
    }
    j["elapsed_ms"] = r.elapsed_ms;
    out << j.dump(2) << "\n";
}

void emit_text(const Outcome& o, const RenderOptions& opts, bool timing, std::ostream& out) {
    const VerificationReport& r = o.report;
    if (!o.report_only_results) {
        out << r.check;
        if (!r.theory.empty()) out << " " << r.theory;
        if (!r.target.empty()) out << " " << r.target;
        out << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
        for (const auto& e : r.residuals) {
            if (!e.expr.is_zero()) out << "  residual " << e.where << ": " << render(e.expr, opts) << "\n";
        }
        for (const auto& c : r.certificates) out << "  certificate " << c.label << ": " << (c.verified ? "verified" : "NOT verified") << "\n";
        for (const auto& a : r.assumptions) out << "  assumption: " << a << "\n";
        for (const auto& n : r.notes) out << "  note: " << n << "\n";
    }
    for (const auto& [where, text] : o.results) out << where << " = " << text << "\n";
    if (timing) out << "  elapsed: " << r.elapsed_ms << " ms\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Noether identities, gauge symmetries and Koszul-Tate checks for polynomial field theories", "nkt"};
    app.require_subcommand(1, 1);

    auto sub = [&](const char* name, const char* help, bool file) {
        CLI::App* s = app.add_subcommand(name, help);
        if (file) s->add_option("file", opt.file, "theory file (.nkt)")->required();
        s->add_flag("--json", opt.json, "emit the machine-readable report");
        s->add_flag("--timing", opt.timing, "record wall-clock time in the report");
        return s;
    };
    sub("el", "Euler-Lagrange expressions of the Lagrangian", true);
    sub("eta", "intertwining operator eta of an operator", true)->add_option("--op", opt.op, "operator name")->required();
    sub("derive-noether", "Noether operator eta(upsilon) of a variational gauge symmetry", true)
        ->add_option("--sym", opt.sym, "gauge operator name")
        ->required();
    sub("derive-gauge", "gauge symmetry eta(Delta) of a Noether operator", true)->add_option("--op", opt.op, "operator name")->required();
    sub("check-noether", "verify the Noether identity Delta(delta L) = 0", true)
        ->add_option("--op", opt.op, "operator name")
        ->required();
    sub("check-variational", "verify that a derivation or gauge operator is a variational symmetry", true)
        ->add_option("--sym", opt.sym, "derivation or gauge operator name")
        ->required();
    sub("check-nilpotent", "verify that an odd derivation squares to zero", true)
        ->add_option("--sym", opt.sym, "derivation or gauge operator name")
        ->required();
    CLI::App* kt = sub("kt", "apply the Koszul-Tate differential to an expression", true);
    kt->add_option("--expr", opt.expr, "expression in the theory's variables")->required();
    kt->add_option("--op", opt.op, "Noether operator for the antighost sector");
    kt->add_flag("--stages", opt.stages, "include the stage operators of a reducibility chain");
    sub("check-reducibility", "verify a reducibility chain against its certificates", true)
        ->add_option("--op", opt.op, "Noether operator (default: the unique one over ghosts)");
    CLI::App* self = sub("selftest", "run the randomized identity suites", false);
    self->add_option("--seed", opt.seed, "random seed");
    self->add_option("--count", opt.count, "cases per suite")->check(CLI::Range(1, 100000));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "nkt: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        const auto start = std::chrono::steady_clock::now();
        Theory theory;
        if (cmd != "selftest") theory = load(opt.file);
        Outcome o;
        if (cmd == "el") {
            o = cmd_el(theory);
        } else if (cmd == "eta") {
            o = cmd_eta(theory, opt);
        } else if (cmd == "derive-noether") {
            o = derived(theory, cmd, opt.sym, true);
        } else if (cmd == "derive-gauge") {
            o = derived(theory, cmd, opt.op, false);
        } else if (cmd == "check-noether") {
            o = cmd_check_noether(theory, opt);
        } else if (cmd == "check-variational") {
            o = cmd_check_variational(theory, opt);
        } else if (cmd == "check-nilpotent") {
            o = cmd_check_nilpotent(theory, opt);
        } else if (cmd == "kt") {
            o = cmd_kt(theory, opt);
        } else if (cmd == "check-reducibility") {
            o = cmd_check_reducibility(theory, opt);
        } else {
            o = cmd_selftest(opt);
        }
        o.report.theory = theory.name;
        if (opt.timing) {
            o.report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
        const RenderOptions opts = theory.render_options();
        if (opt.json) {
            emit_json(o, opts, out);
        } else {
            emit_text(o, opts, opt.timing, out);
        }
        return o.report.pass ? kPass : kFailed;
    } catch (const UsageError& e) {
        err << "nkt " << cmd << ": " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "nkt " << cmd << ": " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace nkt::cli
