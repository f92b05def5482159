#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "nkt/cli.hpp"

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = nkt::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("Euler-Lagrange expressions") {
    auto r = run({"el", theory_path("scalar")});
    CHECK(r.code == nkt::cli::kPass);
    CHECK(r.out == "E_y = -y[;x,x]\n");
}

TEST_CASE("failing Noether identity reports its residual") {
    auto r = run({"check-noether", theory_path("scalar_mass"), "--op", "bad", "--json"});
    CHECK(r.code == nkt::cli::kFailed);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["check"] == "check-noether");
    CHECK(j["pass"] == false);
    REQUIRE(j["residuals"].size() == 1);
    CHECK(j["residuals"][0]["expr"] == "y");
    CHECK(j["elapsed_ms"] == 0.0);
}

TEST_CASE("JSON reports are deterministic") {
    std::vector<std::string> args{"derive-noether", theory_path("ym_su2"), "--sym", "gauge", "--json"};
    auto a = run(args);
    auto b = run(args);
    CHECK(a.code == nkt::cli::kPass);
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["pass"] == true);
    CHECK(j.contains("results"));
}

TEST_CASE("variational symmetry and nilpotency") {
    auto scale = run({"check-variational", theory_path("scalar_mass"), "--sym", "scale"});
    CHECK(scale.code == nkt::cli::kFailed);
    CHECK(scale.out.find("2*y") != std::string::npos);
    CHECK(run({"check-variational", theory_path("ym_su2"), "--sym", "gauge"}).code == nkt::cli::kPass);
    CHECK(run({"check-nilpotent", theory_path("ym_su2"), "--sym", "brst"}).code == nkt::cli::kPass);
    auto perturbed = run({"check-nilpotent", theory_path("ym_su2"), "--sym", "brst_perturbed"});
    CHECK(perturbed.code == nkt::cli::kFailed);
    CHECK(perturbed.out.find("residual") != std::string::npos);
    CHECK(run({"check-nilpotent", theory_path("fermion"), "--sym", "flip"}).code == nkt::cli::kFailed);
}

TEST_CASE("Koszul-Tate and reducibility") {
    auto kt = run({"kt", theory_path("scalar_mass"), "--expr", "anti(y)[;x]*c"});
    CHECK(kt.code == nkt::cli::kPass);
    CHECK(kt.out.find("= -y[;x]*c") != std::string::npos);
    CHECK(run({"check-reducibility", theory_path("twoform")}).code == nkt::cli::kPass);
    CHECK(run({"check-reducibility", theory_path("twoform_wrong")}).code == nkt::cli::kFailed);
    CHECK(run({"check-reducibility", theory_path("maxwell3")}).code == nkt::cli::kPass);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == nkt::cli::kUsage);
    CHECK(run({"bogus"}).code == nkt::cli::kUsage);
    CHECK(run({"el", "/nonexistent/file.nkt"}).code == nkt::cli::kUsage);
    CHECK(run({"eta", theory_path("scalar"), "--op", "missing"}).code == nkt::cli::kUsage);
}

TEST_CASE("selftest") {
    auto r = run({"selftest", "--seed", "3", "--count", "5", "--json"});
    CHECK(r.code == nkt::cli::kPass);
    CHECK(nlohmann::json::parse(r.out)["pass"] == true);
}

}
