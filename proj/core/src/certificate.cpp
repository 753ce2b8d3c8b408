#include "fdom/certificate.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace fdom {

using nlohmann::json;

namespace {

void emit(std::ostringstream& os, const json& v, int level) {
  const std::string pad(static_cast<std::size_t>(2 * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * level), ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        emit(os, it.value(), level + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const json& e : v) flat = flat && !e.is_structured();
      if (flat || (v.size() <= 4 && v[0].is_array() && v[0].size() == 2)) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) os << ", ";
          emit(os, v[i], level + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(os, v[i], level + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = v.get<double>();
      if (std::isfinite(x))
        os << format_double(x);
      else
        os << "null";
      return;
    }
    default:
      os << v.dump();
  }
}

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json matrices(const std::vector<Mobius>& ms, bool real) {
  json out = json::array();
  for (const Mobius& m : ms) {
    json a = json::array();
    for (int k = 0; k < 4; ++k) {
      const Complex z = m.matrix()(k / 2, k % 2);
      if (real)
        a.push_back(z.real());
      else
        a.push_back(json::array({z.real(), z.imag()}));
    }
    out.push_back(a);
  }
  return out;
}

std::vector<Mobius> parse_matrices(const json& a) {
  std::vector<Mobius> out;
  for (const json& m : a) {
    Mat2c x;
    for (int k = 0; k < 4; ++k) {
      const json& e = m.at(static_cast<std::size_t>(k));
      x(k / 2, k % 2) = e.is_array() ? Complex(e[0].get<double>(), e[1].get<double>()) : Complex(e.get<double>(), 0.0);
    }
    out.emplace_back(x);
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double num(const std::string& s) {
  if (s == "nan") return std::nan("");
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return x;
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string inputs_digest(const PipelineConfig& config) {
  PipelineConfig c = config;
  c.output_dir.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string certificate_text(const PipelineResult& r) {
  const PipelineConfig& c = r.config;
  json j;
  j["schema_version"] = kCertificateSchemaVersion;
  j["inputs_digest"] = inputs_digest(c);
  j["config"] = json::parse(config_to_text(c));
  j["genus"] = c.genus;
  j["target"] = to_string(c.target);
  j["euler_class"] = r.euler ? json(*r.euler) : json(nullptr);
  json pts = json::array();
  for (const auto& p : r.orbit.points)
    pts.push_back(p ? json::array({p->real(), p->imag()}) : json("inf"));
  j["elementary_route"] = {{"used", r.elementary_route},
                           {"kind", to_string(r.orbit.kind)},
                           {"trivial", r.orbit.trivial},
                           {"borderline", r.orbit.borderline},
                           {"points", pts}};
  j["flow"] = {{"converged", r.flow.converged},    {"iterations", r.flow.iterations},
               {"energy", r.energy},               {"sup_tension", r.flow.sup_tension},
               {"tolerance", r.flow.tolerance},    {"binding_residual", r.flow.binding_residual},
               {"diagnosis", r.flow.diagnosis}};
  j["hopf"] = {{"sup_phi", r.sup_phi}, {"holomorphicity_residual", r.holomorphicity}};
  j["wolf"] = {{"collocation", "vertex"}, {"residual", r.wolf_residual}, {"newton_iterations", r.wolf_iterations}};
  const DominationReport& d = r.domination;
  j["domination"] = {{"lambda", d.lambda},
                     {"lambda_before_uniformization", r.lambda_wolf},
                     {"min_gap_h", d.min_gap_h},
                     {"margin", d.margin},
                     {"strict", d.strict},
                     {"totally_geodesic_detected", d.totally_geodesic},
                     {"hl_mismatch", r.comparison.hl_mismatch},
                     {"picard",
                      {{"K", d.picard.K},
                       {"max_w", d.picard.max_w},
                       {"sup_abs_w", d.picard.sup_abs_w},
                       {"branch", d.picard.branch},
                       {"dichotomy_holds", d.picard.dichotomy_holds},
                       {"hypothesis_violations", d.picard.hypothesis_violations},
                       {"worst_violation", d.picard.worst_violation}}}};
  const CurvatureStats& cs = r.curvature;
  j["curvature"] = {{"min_beta", real_or_null(cs.min_beta)},
                    {"beta_coverage", cs.beta_coverage},
                    {"kappa_g1_defect_rms", real_or_null(cs.kappa_g1_rms)},
                    {"kappa_g1_total", cs.kappa_g1_total},
                    {"kappa_g0_defect_rms", real_or_null(cs.kappa_g0_rms)},
                    {"pullback_coverage", cs.pullback_coverage},
                    {"pullback_fraction_below_minus_0_9", cs.pullback_fraction},
                    {"pullback_min_minus_kappa", real_or_null(cs.pullback_min)}};
  j["g1"] = {{"length_mismatch_rms", r.g1_lengths.mismatch_rms},
             {"max_relative_deviation_from_g0", r.g1_g0_length_deviation},
             {"uniformization",
              {{"iterations", r.uniformized.iterations},
               {"initial_angle_defect", r.uniformized.initial_defect},
               {"final_angle_defect", r.uniformized.max_angle_defect},
               {"sup_abs_u", r.uniformized.u.size() ? r.uniformized.u.cwiseAbs().maxCoeff() : 0.0}}}};
  json fits = json::array();
  for (const auto& f : r.developed.fits) fits.push_back({{"generator", f.generator}, {"point_pairs", f.point_pairs}, {"rms", f.rms}});
  j["holonomy"] = {{"j", matrices(r.developed.j.images, true)},
                   {"relator_residual", r.developed.relator_residual},
                   {"fits", fits}};
  j["rho"] = matrices(r.rho.images, false);
  j["spectrum"] = {{"max_word_length", r.spectrum.max_word_length},
                   {"rows", r.spectrum.rows.size()},
                   {"violations", r.spectrum.violations.size()},
                   {"max_ratio", r.spectrum.max_ratio},
                   {"tolerance", 1e-9}};
  if (r.critical)
    j["critical_exponent"] = {{"delta", r.critical->delta},   {"radius", r.critical->radius},
                              {"count", r.critical->count},   {"word_cap", r.critical->word_cap},
                              {"slack", r.critical->slack},   {"heuristic", true}};
  else
    j["critical_exponent"] = nullptr;
  j["ads_admissible"] = r.ads_admissible;
  j["mesh"] = {{"genus", r.mesh.genus()},
               {"subdivision", r.mesh.subdivision()},
               {"vertices", r.mesh.vertex_count()},
               {"faces", r.mesh.face_count()},
               {"area", r.mesh.total_area()}};
  j["tolerances"] = {{"flow", r.flow.tolerance},         {"newton", c.tol_newton},
                     {"relator", c.tol_relator},         {"elementary", c.tol_elementary},
                     {"geodesic", c.tol_geodesic},       {"picard", 1e-3},
                     {"beta_degenerate", 0.05},          {"margin_factor", 10.0}};
  j["warnings"] = r.warnings;
  j["files"] = {{"faces", "faces.csv"}, {"vertices", "vertices.csv"}, {"spectrum", "spectrum.csv"}};
  std::ostringstream os;
  emit(os, j, 0);
  os << "\n";
  return os.str();
}

std::string face_table(const PipelineResult& r) {
  std::ostringstream os;
  os << "face,e,normSq,H2,L2,H1,L1,ratio,degenerate,fxx,fxy,fyy,g1xx,g1xy,g1yy\n";
  for (std::size_t f = 0; f < r.faces.size(); ++f) {
    const FaceRow& x = r.faces[f];
    os << f;
    for (double v : {x.e, x.norm_sq, x.H2, x.L2, x.H1, x.L1, x.ratio}) os << ',' << format_double(v);
    os << ',' << (x.degenerate ? 1 : 0);
    for (int k = 0; k < 3; ++k) os << ',' << format_double(x.pullback[k]);
    for (int k = 0; k < 3; ++k) os << ',' << format_double(x.g1[k]);
    os << '\n';
  }
  return os.str();
}

std::string vertex_table(const PipelineResult& r) {
  std::ostringstream os;
  os << "vertex,kappa_g1,kappa_pullback,beta,w\n";
  for (std::size_t v = 0; v < r.vertices.size(); ++v) {
    const VertexRow& x = r.vertices[v];
    os << v << ',' << format_double(x.kappa_g1) << ',' << format_double(x.kappa_pullback) << ',' << format_double(x.beta)
       << ',' << format_double(x.w) << '\n';
  }
  return os.str();
}

std::string spectrum_table(const SpectrumTable& t) {
  std::ostringstream os;
  os << "word,l_rho,l_j,ratio\n";
  for (const SpectrumRow& row : t.rows) {
    os << row.word.to_string() << ',' << format_double(row.l_rho) << ',' << format_double(row.l_j) << ',';
    if (row.ratio) os << format_double(*row.ratio);
    os << '\n';
  }
  return os.str();
}

VerifyResult verify_certificate(const std::string& certificate, const std::string& faces_csv,
                                const std::string& spectrum_csv) {
  VerifyResult out;
  auto fail = [&](const std::string& what) {
    out.pass = false;
    out.failure = what;
    return out;
  };
  json j;
  try {
    j = json::parse(certificate);
  } catch (const json::exception& e) {
    return fail(std::string("certificate: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kCertificateSchemaVersion) return fail("schema_version mismatch");
    ++out.checks;
    const json& d = j.at("domination");
    const double lambda = d.at("lambda").get<double>();
    const double margin = d.at("margin").get<double>();
    const double min_gap = d.at("min_gap_h").get<double>();
    const bool strict = d.at("strict").get<bool>();
    const bool tg = d.at("totally_geodesic_detected").get<bool>();

    // Face table.
    std::istringstream fs(faces_csv);
    std::string line;
    std::getline(fs, line);
    if (line.rfind("face,e,normSq", 0) != 0) return fail("faces: bad header");
    double gap = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
    std::size_t rows = 0;
    while (std::getline(fs, line)) {
      if (line.empty()) continue;
      const auto c = split(line);
      if (c.size() != 15) return fail("faces: row " + std::to_string(rows) + " has " + std::to_string(c.size()) + " columns");
      const std::string where = "face " + c[0];
      const double e = num(c[1]), q = num(c[2]), h2 = num(c[3]), l2 = num(c[4]), h1 = num(c[5]), l1 = num(c[6]), ratio = num(c[7]);
      const bool degenerate = c[8] == "1";
      const Eigen::Vector3d a(num(c[9]), num(c[10]), num(c[11])), b(num(c[12]), num(c[13]), num(c[14]));
      const double scale = std::max(1.0, e * e);
      if (std::abs(h2 + l2 - e) > 1e-12 * std::max(1.0, e)) return fail(where + ": H2 + L2 != e");
      if (std::abs(h2 * l2 - q) > 1e-12 * scale) return fail(where + ": H2 L2 != normSq");
      if (std::abs(h1 * l1 - q) > 1e-12 * std::max(1.0, h1 * h1)) return fail(where + ": H1 L1 != normSq");
      if (std::abs((h2 - l2) * (h2 - l2) - (e * e - 4.0 * q)) > 1e-10 * scale) return fail(where + ": (H2 - L2)^2 != e^2 - 4 normSq");
      const double mu = max_generalized_eigenvalue(a, b);
      if (!close_rel(mu, ratio, 1e-9)) return fail(where + ": eigenvalue ratio does not match the forms");
      if (ratio > lambda * lambda * (1.0 + 1e-10) + 1e-14) return fail(where + ": eigenvalue bound ratio <= lambda^2 violated");
      max_ratio = std::max(max_ratio, ratio);
      const double h2e = degenerate ? std::sqrt(std::max(0.0, h2 * l2)) : h2;
      gap = std::min(gap, h1 - h2e);
      out.checks += 6;
      ++rows;
    }
    if (rows != j.at("mesh").at("faces").get<std::size_t>()) return fail("faces: row count does not match the mesh");
    if (!close_rel(std::sqrt(max_ratio), lambda, 1e-10)) return fail("lambda is not the square root of the largest ratio");
    if (!close_rel(gap, min_gap, 1e-12)) return fail("min_gap_h does not match the face table");
    out.checks += 3;

    // Verdicts.
    if (strict != (!tg && lambda < 1.0 - margin)) return fail("strict flag inconsistent with lambda and margin");
    const json& sp = j.at("spectrum");
    const std::size_t violations = sp.at("violations").get<std::size_t>();
    const bool ads = j.at("target").get<std::string>() == "h2" && strict && violations == 0;
    if (ads != j.at("ads_admissible").get<bool>()) return fail("ads_admissible inconsistent");
    out.checks += 2;

    // Generators.
    const int genus = j.at("genus").get<int>();
    Representation rho, jj;
    rho.presentation = jj.presentation = SurfaceGroupPresentation(genus);
    rho.target = parse_target(j.at("target").get<std::string>());
    rho.images = parse_matrices(j.at("rho"));
    jj.images = parse_matrices(j.at("holonomy").at("j"));
    if (static_cast<int>(rho.images.size()) != 2 * genus || static_cast<int>(jj.images.size()) != 2 * genus)
      return fail("generator count");
    if (!close_rel(jj.relator_residual(), j.at("holonomy").at("relator_residual").get<double>(), 1e-6))
      return fail("relator residual of j does not match");
    out.checks += 2;

    // Spectrum rows.
    const int max_len = sp.at("max_word_length").get<int>();
    const double tol = sp.at("tolerance").get<double>();
    const auto words = enumerate_conjugacy_words(rho.presentation, max_len);
    std::istringstream ss(spectrum_csv);
    std::getline(ss, line);
    if (line != "word,l_rho,l_j,ratio") return fail("spectrum: bad header");
    std::size_t i = 0, count = 0;
    double mr = 0.0;
    while (std::getline(ss, line)) {
      if (line.empty()) continue;
      if (i >= words.size()) return fail("spectrum: extra rows");
      const auto c = split(line);
      if (c.size() != 4) return fail("spectrum: row " + std::to_string(i) + " malformed");
      const Word& w = words[i];
      if (c[0] != w.to_string()) return fail("spectrum: row " + std::to_string(i) + " word " + c[0] + " != " + w.to_string());
      // Products of up to max_len matrices lose a few digits, so the
      // recomputation is compared loosely and the stored values are used below.
      const double lr = num(c[1]), lj = num(c[2]);
      if (!close_rel(translation_length(evaluate(rho, w)), lr, 1e-7) || !close_rel(translation_length(evaluate(jj, w)), lj, 1e-7))
        return fail("spectrum: row " + std::to_string(i) + " (" + c[0] + ") does not match the generators");
      if (lj > tol) {
        if (c[3].empty() || !close_rel(lr / lj, num(c[3]), 1e-9)) return fail("spectrum: ratio of row " + std::to_string(i));
        mr = std::max(mr, lr / lj);
      } else if (!c[3].empty()) {
        return fail("spectrum: ratio present on row " + std::to_string(i));
      }
      if (lr > lambda * lj + tol) ++count;
      ++i;
      out.checks += 3;
    }
    if (i != words.size()) return fail("spectrum: missing rows");
    if (i != sp.at("rows").get<std::size_t>()) return fail("spectrum: row count");
    if (count != violations) return fail("spectrum: violation count does not match");
    if (!close_rel(mr, sp.at("max_ratio").get<double>(), 1e-9)) return fail("spectrum: max_ratio does not match");
    out.checks += 3;
    out.strict = strict;
  } catch (const std::exception& e) {
    return fail(std::string("malformed input: ") + e.what());
  }
  out.pass = true;
  return out;
}

}  // namespace fdom
