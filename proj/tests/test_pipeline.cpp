#include <stdexcept>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "fdom/certificate.hpp"
#include "fdom/pipeline.hpp"

using namespace fdom;
namespace fs = std::filesystem;

namespace {

PipelineConfig small(const std::string& preset) {
  PipelineConfig c;
  c.preset = preset;
  c.subdivision = 2;
  c.max_word_length = 3;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(FDOM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const PipelineConfig c = parse_config(R"({"genus": 2, "preset": "swap", "mesh": {"subdivision": 4},
    "tol": {"geodesic": 0.1}, "spectrum": {"maxWordLength": 5}, "seed": 7})");
  CHECK(c.preset == "swap");
  CHECK(c.subdivision == 4);
  CHECK(c.tol_geodesic == 0.1);
  CHECK(c.max_word_length == 5);
  CHECK(c.seed == 7);
  const PipelineConfig r = parse_config(config_to_text(c));
  CHECK(config_to_text(r) == config_to_text(c));

  CHECK_THROWS_AS(parse_config("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"genus": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"mesh": {"subdivision": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"generators": [[1, 0, 0, 1]]})"), std::invalid_argument);

  const PipelineConfig m = parse_config(R"({"generators": [[1,0,0,1],[1,0,0,1],[[1,0],0,0,1],[1,0,0,1]]})");
  CHECK(m.generators.size() == 4);
  const FundamentalDomainMesh mesh = build_regular_domain(2, 1);
  CHECK(config_representation(m, mesh).relator_residual() < 1e-12);
  PipelineConfig unknown;
  unknown.preset = "nope";
  CHECK_THROWS_AS(config_representation(unknown, mesh), std::invalid_argument);
}

TEST_CASE("trivial representation is strictly dominated") {
  const PipelineResult r = run_pipeline(small("trivial"));
  CHECK(r.elementary_route);
  CHECK(r.domination.lambda == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.domination.strict);
  CHECK(r.ads_admissible);
  CHECK(exit_code(r) == 0);
  CHECK(r.spectrum.violations.empty());
}

TEST_CASE("pipeline output is deterministic and verifiable") {
  const PipelineConfig c = small("swap");
  const PipelineResult a = run_pipeline(c), b = run_pipeline(c);
  const std::string ca = certificate_text(a);
  CHECK(ca == certificate_text(b));
  CHECK(face_table(a) == face_table(b));
  CHECK(a.euler.value_or(-1) == 0);

  const std::string faces = face_table(a), spec = spectrum_table(a.spectrum);
  const VerifyResult v = verify_certificate(ca, faces, spec);
  CHECK_MESSAGE(v.pass, v.failure);
  CHECK(v.strict == a.domination.strict);

  nlohmann::json t = nlohmann::json::parse(ca);
  t["domination"]["lambda"] = t["domination"]["lambda"].get<double>() * 0.5;
  const VerifyResult bad = verify_certificate(t.dump(), faces, spec);
  CHECK_FALSE(bad.pass);
  CHECK(bad.failure.find("eigenvalue bound") != std::string::npos);

  // Second field of the first data row: l_rho.
  std::string spec_bad = spec;
  const auto start = spec_bad.find(',', spec_bad.find('\n')) + 1;
  spec_bad.replace(start, spec_bad.find(',', start) - start, "12.5");
  CHECK_FALSE(verify_certificate(ca, faces, spec_bad).pass);

  nlohmann::json s = nlohmann::json::parse(ca);
  s["schema_version"] = 99;
  CHECK_FALSE(verify_certificate(s.dump(), faces, spec).pass);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = fs::temp_directory_path() / "fdom_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string out = (dir / "triv").string();
  std::ofstream(dir / "trivial.json") << R"({"preset": "trivial", "mesh": {"subdivision": 2}, "spectrum": {"maxWordLength": 2}})";
  std::ofstream(dir / "swap.json") << R"({"preset": "swap", "mesh": {"subdivision": 2}, "spectrum": {"maxWordLength": 2}})";

  CHECK(run("gen-domain --subdivision 1 --out " + (dir / "dom").string()) == 0);
  CHECK(fs::exists(dir / "dom" / "mesh.txt"));
  CHECK(parse_config(slurp(dir / "dom" / "base_config.json")).generators.size() == 4);

  CHECK(run("solve --config " + (dir / "trivial.json").string() + " --out " + out) == 0);
  CHECK(run("verify --out " + out) == 0);
  CHECK(run("verify --config " + (dir / "trivial.json").string() + " --out " + out) == 0);
  CHECK(run("verify --config " + (dir / "swap.json").string() + " --out " + out) == 2);

  const std::string sw = (dir / "swap").string();
  CHECK(run("solve --config " + (dir / "swap.json").string() + " --out " + sw) == 1);
  CHECK(run("verify --out " + sw) == 1);
  const std::string cert = slurp(fs::path(sw) / "certificate.json");
  std::ofstream(fs::path(sw) / "faces.csv", std::ios::app) << "999,1,1,1,1,1,1,1,0,1,0,1,1,0,1\n";
  CHECK(run("verify --out " + sw) == 2);

  CHECK(run("spectrum --max-word-len 2 --out " + (dir / "sp").string()) == 0);
  CHECK(run("spectrum --config " + (dir / "swap.json").string() + " --j-from " + (fs::path(sw) / "certificate.json").string() +
            " --max-word-len 2") == 0);
  CHECK(run("solve --subdivision 0") == 2);
  CHECK(run("solve --config " + (dir / "missing.json").string()) == 2);
  CHECK(run("bogus") == 2);
  CHECK(cert.find("\"schema_version\"") != std::string::npos);
  fs::remove_all(dir);
}
