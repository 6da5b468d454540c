#include "doctest.h"

#include <random>

#include "test_support.hpp"
#include "ucpext/extension.hpp"
#include "ucpext/json_io.hpp"
#include "ucpext/scenario.hpp"

using namespace ucpext;
using cli::json;

namespace {

cli::Report run(const std::string& text, const cli::RunFlags& flags = {}) {
  return cli::run_scenario(json::parse(text), flags);
}

CMatrix y_action(const cli::Report& r) { return io::matrix_from_json(r.doc["results"]["action"]["Y"]); }

}  // namespace

TEST_CASE("matrix and superoperator JSON round trip bit-exactly") {
  std::mt19937_64 rng(51);
  for (int n = 0; n < 20; ++n) {
    const CMatrix m = testing::random_matrix(rng, 3, 3, 1e3);
    CHECK(io::matrix_from_json(json::parse(io::to_json(m).dump())) == m);
    const SuperOp s = testing::random_ucp(rng, 2);
    const json j = io::to_json(s);
    CHECK(j["convention"] == "col-stack-blocks-Eij");
    CHECK(io::superop_from_json(json::parse(j.dump())) == s);
  }
  CHECK(io::matrix_from_json(json::parse("[[1, [0, 2]], [[0, -2], 3]]"))(0, 1) == cplx{0, 2});
  CHECK_THROWS(io::matrix_from_json(json::parse("[[1, 2], [3]]")));
  CHECK_THROWS(io::matrix_from_json(json::parse("[[1, [0, 2, 3]]]")));
}

TEST_CASE("report matrices re-parse to the library result") {
  const cli::Report r = run(R"({"system":"rebit","dynamics":"rebit_dissipative","command":"extend-generator","options":{"seed":3}})");
  REQUIRE(r.exit_code() == 0);
  ExtensionOptions o;
  o.seed = 3;
  o.start = StartMode::random;
  const GeneratorExtension e = extend_generator(ExtensionProblem(catalog::rebit_dissipative(1.0), o));
  const json reparsed = json::parse(r.doc.dump());
  CHECK(io::superop_from_json(reparsed["results"]["generator"]) == e.generator);
}

TEST_CASE("reports are deterministic") {
  const std::string s = R"({"system":"rebit","dynamics":"rebit_dissipative","command":"extend-generator","options":{"seed":9}})";
  CHECK(run(s).doc.dump() == run(s).doc.dump());
  CHECK(cli::demo_rebit().doc.dump() == cli::demo_rebit().doc.dump());
}

TEST_CASE("documented scenarios") {
  const cli::Report group =
      run(R"({"system":"rebit","dynamics":"rebit_rotation","command":"extend-group","options":{"omega_param":1.0}})");
  CHECK(group.exit_code() == 0);
  CHECK(group.doc["results"]["reference_distance"].get<double>() <= 1e-6);

  const cli::Report s1 = run(R"({"system":"rebit","dynamics":"rebit_dissipative","command":"extend-generator","options":{"seed":1}})");
  const cli::Report s7 = run(R"({"system":"rebit","dynamics":"rebit_dissipative","command":"extend-generator","options":{"seed":7}})");
  CHECK(s1.exit_code() == 0);
  CHECK(s7.exit_code() == 0);
  CHECK(frobenius_distance(y_action(s1), y_action(s7)) > 1e-3);

  const cli::Report ids = run(R"({"system":"M2","dynamics":"g1","command":"identities"})");
  CHECK(ids.exit_code() == 0);
  CHECK(ids.doc["results"]["hilbert_identity"]["max_residual"].get<double>() <= 1e-9);
}

TEST_CASE("every command runs") {
  const char* scenarios[] = {
      R"({"command":"check-cp","map":"transpose_3"})",
      R"({"command":"check-cp","map":{"kind":"kraus","ops":[[[0,1],[1,0]]]}})",
      R"({"system":"M2","dynamics":"g2","command":"check-ccp"})",
      R"({"system":"rebit","dynamics":"rebit_rotation","command":"validate"})",
      R"({"system":"M2","dynamics":"g1","command":"evolve","options":{"times":[0,1]}})",
      R"({"system":"M2","dynamics":{"kind":"gksl","H":[[1,0],[0,-1]],"jumps":[{"op":[[0,1],[0,0]],"rate":0.5}]},"command":"resolvent"})",
      R"({"system":"rebit","dynamics":"rebit_rotation","command":"extend-resolvent-family"})",
      R"({"system":"rebit","map":"identity","command":"extend-map"})",
      R"({"system":"rebit","dynamics":"rebit_dissipative","command":"extend-discrete","options":{"horizon":2}})",
      R"({"system":"rebit","command":"rigidity-probe","options":{"starts":3}})",
      R"({"command":"demo-rebit"})",
  };
  for (const char* s : scenarios) {
    CAPTURE(s);
    const cli::Report r = run(s);
    CHECK(r.exit_code() == 0);
    CHECK(r.doc["status"] == "ok");
    CHECK(r.doc["provenance"]["tool"] == "ucpext");
  }
}

TEST_CASE("exit codes") {
  SUBCASE("malformed input") {
    const char* bad[] = {
        R"({"command":"no-such-command"})",
        R"({"system":"rebit","dynamics":"rebit_rotation"})",
        R"({"system":"rebit","dynamics":"rebit_rotation","command":"validate","options":{"tol":-1}})",
        R"({"system":"rebit","dynamics":"rebit_rotation","command":"validate","options":{"bogus":1}})",
        R"({"system":"rebit","dynamics":"rebit_rotation","command":"validate","options":{"lambdas":[1,0]}})",
        R"({"system":"nowhere","command":"rigidity-probe"})",
        R"({"system":{"basis":[[[0,1],[1,0]]]},"command":"rigidity-probe"})",
        R"({"system":"rebit","dynamics":{"kind":"subsystem","images":[[[0,0],[0,0]]]},"command":"validate"})",
        R"({"system":"diagonal","dynamics":"rebit_rotation","command":"validate"})",
        R"({"command":"extend-map","system":"rebit"})",
        R"([1,2,3])",
    };
    for (const char* s : bad) {
      CAPTURE(s);
      const cli::Report r = run(s);
      CHECK(r.exit_code() == 2);
      CHECK(r.doc["status"] == "invalid-input");
      CHECK(r.doc["error"]["message"].is_string());
    }
    CHECK(cli::run_file("/nonexistent/scenario.json").exit_code() == 2);
  }
  SUBCASE("mathematical failure") {
    const cli::Report grow = run(
        R"({"system":"rebit","dynamics":{"kind":"subsystem","images":[[[0,0],[0,0]],[[0,1],[1,0]],[[0,0],[0,0]]]},"command":"validate"})");
    CHECK(grow.exit_code() == 1);
    CHECK(grow.doc["results"]["reason"].get<std::string>().find("not a UCP subsystem semigroup") == 0);
    const cli::Report group = run(R"({"system":"rebit","dynamics":"rebit_dissipative","command":"extend-group"})");
    CHECK(group.exit_code() == 1);
    const cli::Report infeasible =
        run(R"({"system":"rebit","map":{"kind":"images","images":[[[1,0],[0,1]],[[0,2],[2,0]],[[1,0],[0,-1]]]},"command":"extend-map","options":{"max_iter":500}})");
    CHECK(infeasible.exit_code() == 1);
  }
}

TEST_CASE("demo with the 4/3 prefactor reports the mismatch") {
  cli::RunFlags flags;
  flags.g2_prefactor = catalog::G2Prefactor::printed;
  const cli::Report r = cli::demo_rebit(flags);
  CHECK(r.exit_code() == 1);
  const auto failed = r.doc["failed_checks"].get<std::vector<std::string>>();
  CHECK(std::find(failed.begin(), failed.end(), "g2_extends_dissipative") != failed.end());
  for (const auto& c : r.doc["results"]["checks"])
    if (c["name"] == "g2_extends_dissipative") {
      CHECK(c["detail"]["x_coefficient"].get<double>() == doctest::Approx(-16.0 / 9.0));
      CHECK(c["detail"]["expected_x_coefficient"].get<double>() == -1.0);
    }
  CHECK(cli::demo_rebit().exit_code() == 0);
}

TEST_CASE("text rendering uses three significant digits for residuals") {
  const cli::Report r = run(R"({"system":"M2","dynamics":"g1","command":"identities"})");
  const std::string text = cli::render_text(r.doc);
  CHECK(text.find("status: \"ok\"") != std::string::npos);
  CHECK(text.find("max_residual: ") != std::string::npos);
  const auto pos = text.find("max_residual: ") + 14;
  const std::string value = text.substr(pos, text.find('\n', pos) - pos);
  CHECK(value.size() == 8);  // d.dde-XX
  CHECK(value[1] == '.');
}
