// fdom: gen-domain, solve, verify, spectrum.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdom/certificate.hpp"
#include "fdom/pipeline.hpp"

namespace fs = std::filesystem;
using namespace fdom;

namespace {

constexpr int kFailure = 2;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void dump(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

struct Common {
  std::string config;
  std::string out;
  int subdivision = -1;
  int max_word_len = -1;
  long long seed = -1;
};

PipelineConfig load(const Common& o) {
  PipelineConfig c = o.config.empty() ? PipelineConfig{} : parse_config(slurp(o.config));
  if (o.config.empty()) c.preset = "base";
  if (o.subdivision >= 0) c.subdivision = o.subdivision;
  if (o.max_word_len >= 0) c.max_word_length = o.max_word_len;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.out.empty()) c.output_dir = o.out;
  if (c.subdivision < 1) throw std::invalid_argument("--subdivision must be >= 1");
  if (c.max_word_length < 1) throw std::invalid_argument("--max-word-len must be >= 1");
  return c;
}

int gen_domain(const Common& o) {
  PipelineConfig c = load(o);
  const FundamentalDomainMesh mesh = build_regular_domain(c.genus, c.subdivision);
  fs::create_directories(c.output_dir);
  std::ostringstream ms;
  write_mesh(ms, mesh);
  dump(fs::path(c.output_dir) / "mesh.txt", ms.str());
  c.generators = mesh.base_holonomy().images;
  c.target = Target::H2;
  c.preset.clear();
  dump(fs::path(c.output_dir) / "base_config.json", config_to_text(c));
  std::printf("genus %d subdivision %d: %zu vertices, %zu faces, area %s\n", mesh.genus(), mesh.subdivision(),
              mesh.vertex_count(), mesh.face_count(), format_double(mesh.total_area()).c_str());
  return 0;
}

int solve(const Common& o) {
  const PipelineConfig c = load(o);
  const PipelineResult r = run_pipeline(c);
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  dump(dir / "config.json", config_to_text(c));
  dump(dir / "certificate.json", certificate_text(r));
  dump(dir / "faces.csv", face_table(r));
  dump(dir / "vertices.csv", vertex_table(r));
  dump(dir / "spectrum.csv", spectrum_table(r.spectrum));
  const DominationReport& d = r.domination;
  std::printf("route %s\nlambda %s\nmin_gap_h %s\nmargin %s\nstrict %s\ntotally_geodesic %s\nspectrum_violations %zu\nads_admissible %s\n",
              r.elementary_route ? "elementary" : "nonelementary", format_double(d.lambda).c_str(),
              format_double(d.min_gap_h).c_str(), format_double(d.margin).c_str(), d.strict ? "true" : "false",
              d.totally_geodesic ? "true" : "false", r.spectrum.violations.size(), r.ads_admissible ? "true" : "false");
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return exit_code(r);
}

int verify(const Common& o) {
  const fs::path dir(o.out.empty() ? (o.config.empty() ? "." : load(o).output_dir) : o.out);
  const std::string cert = slurp(dir / "certificate.json");
  if (!o.config.empty()) {
    const PipelineConfig c = load(o);
    const auto j = nlohmann::json::parse(cert);
    if (j.at("inputs_digest").get<std::string>() != inputs_digest(c)) {
      std::printf("FAIL: inputs_digest does not match --config\n");
      return kFailure;
    }
  }
  const VerifyResult v = verify_certificate(cert, slurp(dir / "faces.csv"), slurp(dir / "spectrum.csv"));
  if (!v.pass) {
    std::printf("FAIL: %s\n", v.failure.c_str());
    return kFailure;
  }
  std::printf("PASS (%d checks, %s)\n", v.checks, v.strict ? "strict" : "non-strict");
  return v.strict ? 0 : 1;
}

int spectrum(const Common& o, const std::string& j_from) {
  const PipelineConfig c = load(o);
  const FundamentalDomainMesh mesh = build_regular_domain(c.genus, 1);
  const Representation rho = config_representation(c, mesh);
  Representation j = mesh.base_holonomy();
  double lambda = 1.0;
  if (!j_from.empty()) {
    const auto cert = nlohmann::json::parse(slurp(j_from));
    PipelineConfig jc;
    jc.genus = cert.at("genus").get<int>();
    for (const auto& m : cert.at("holonomy").at("j")) {
      Mat2c a;
      for (int k = 0; k < 4; ++k) a(k / 2, k % 2) = m.at(static_cast<std::size_t>(k)).get<double>();
      jc.generators.emplace_back(a);
    }
    j = config_representation(jc, mesh);
    lambda = cert.at("domination").at("lambda").get<double>();
  }
  const SpectrumTable t = verify_spectrum_domination(j, rho, lambda, c.max_word_length);
  const std::string text = spectrum_table(t);
  if (o.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    fs::create_directories(o.out);
    dump(fs::path(o.out) / "spectrum.csv", text);
  }
  std::fprintf(stderr, "rows %zu violations %zu (lambda %s) max_ratio %s\n", t.rows.size(), t.violations.size(),
               format_double(lambda).c_str(), format_double(t.max_ratio).c_str());
  return t.violations.empty() ? 0 : 1;
}

void add_common(CLI::App* cmd, Common& o, bool solver_flags) {
  cmd->add_option("--config", o.config, "pipeline config (JSON)");
  cmd->add_option("--out", o.out, "output directory");
  if (!solver_flags) return;
  cmd->add_option("--subdivision", o.subdivision, "mesh refinement rounds (>= 1)");
  cmd->add_option("--max-word-len", o.max_word_len, "longest word in the spectrum table");
  cmd->add_option("--seed", o.seed, "seed of the initial map");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuchsian domination of surface group representations"};
  app.require_subcommand(1);
  Common o;
  std::string j_from;
  auto* gen = app.add_subcommand("gen-domain", "write the triangulated regular domain and its base holonomy config");
  add_common(gen, o, true);
  auto* sol = app.add_subcommand("solve", "run the pipeline and write the certificate and tables");
  add_common(sol, o, true);
  auto* ver = app.add_subcommand("verify", "re-check a certificate from its tables");
  add_common(ver, o, false);
  auto* spec = app.add_subcommand("spectrum", "length spectrum table of rho against j");
  add_common(spec, o, true);
  spec->add_option("--j-from", j_from, "certificate whose extracted j (and lambda) to use; default: base holonomy");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kFailure;
  }
  try {
    if (*gen) return gen_domain(o);
    if (*sol) return solve(o);
    if (*ver) return verify(o);
    if (*spec) return spectrum(o, j_from);
  } catch (const StageError& e) {
    std::fprintf(stderr, "error in stage %s\n", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
