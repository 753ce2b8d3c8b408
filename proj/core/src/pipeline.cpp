#include "fdom/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

namespace fdom {

using nlohmann::json;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Complex parse_entry(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw std::invalid_argument("matrix entry must be a number or [re, im]");
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

// Frame whose ray i e^t runs from q (t -> -inf) to p (t -> +inf); q may be absent.
Mobius axis_frame(std::optional<Complex> p, std::optional<Complex> q) {
  Mat2c m;
  if (!p) {
    m << 1.0, q.value_or(0.0), 0.0, 1.0;
  } else if (!q) {
    m << *p, -1.0, 1.0, 0.0;
  } else {
    m << *p, *q, 1.0, 1.0;
  }
  return Mobius(m);
}

// Point of H2 fixed by an elliptic element.
std::optional<HPoint> elliptic_fixed_point(const Mobius& g) {
  const Mat2c& m = g.matrix();
  if (std::abs(m(1, 0)) < 1e-14) return std::nullopt;
  const Complex a = m(1, 0), b = m(1, 1) - m(0, 0), c = -m(0, 1);
  const Complex s = std::sqrt(b * b - 4.0 * a * c);
  for (const Complex z : {(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)})
    if (z.imag() > 1e-12) return from_upper_half_plane(z);
  return std::nullopt;
}

double rms_defect(const CurvatureReport& c) {
  double s = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < c.kappa.size(); ++i)
    if (c.covered[static_cast<std::size_t>(i)]) {
      s += std::pow(c.kappa[i] + 1.0, 2);
      ++n;
    }
  return n ? std::sqrt(s / n) : kNaN;
}

std::vector<std::array<double, 3>> sqrt_lengths(const std::vector<std::array<double, 3>>& sq) {
  auto out = sq;
  for (auto& t : out)
    for (double& x : t) x = std::sqrt(std::max(0.0, x));
  return out;
}

FaceForms forms_from_lengths(const FundamentalDomainMesh& mesh, const EdgeLengths& lengths) {
  FaceForms out(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Eigen::Vector3d sq(lengths[f][0] * lengths[f][0], lengths[f][1] * lengths[f][1], lengths[f][2] * lengths[f][2]);
    out[f] = mesh.frames()[f].edge_to_form * sq;
  }
  return out;
}

template <class F>
auto stage(const char* name, F&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  PipelineConfig c;
  try {
    read(j, "genus", c.genus);
    if (j.contains("target")) c.target = parse_target(j.at("target").get<std::string>());
    read(j, "preset", c.preset);
    if (j.contains("generators")) {
      for (const json& m : j.at("generators")) {
        if (!m.is_array() || m.size() != 4) throw std::invalid_argument("generator matrices are 4 row-major entries");
        Mat2c a;
        a << parse_entry(m[0]), parse_entry(m[1]), parse_entry(m[2]), parse_entry(m[3]);
        c.generators.emplace_back(a);
      }
    }
    if (j.contains("mesh")) read(j.at("mesh"), "subdivision", c.subdivision);
    if (j.contains("tol")) {
      const json& t = j.at("tol");
      read(t, "flow", c.tol_flow);
      read(t, "newton", c.tol_newton);
      read(t, "relator", c.tol_relator);
      read(t, "elementary", c.tol_elementary);
      read(t, "geodesic", c.tol_geodesic);
    }
    if (j.contains("spectrum")) {
      read(j.at("spectrum"), "maxWordLength", c.max_word_length);
      read(j.at("spectrum"), "criticalRadius", c.critical_radius);
    }
    read(j, "seed", c.seed);
    read(j, "initSpread", c.init_spread);
    read(j, "output", c.output_dir);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (c.genus < 2) throw std::invalid_argument("config: genus must be >= 2");
  if (c.subdivision < 1) throw std::invalid_argument("config: subdivision must be >= 1");
  if (c.max_word_length < 1) throw std::invalid_argument("config: maxWordLength must be >= 1");
  if (!(c.tol_newton > 0.0 && c.tol_relator > 0.0 && c.tol_elementary > 0.0 && c.tol_geodesic > 0.0))
    throw std::invalid_argument("config: tolerances must be > 0");
  if (c.tol_flow == 0.0) throw std::invalid_argument("config: tol.flow must be nonzero (negative selects the default)");
  if (!c.generators.empty() && static_cast<int>(c.generators.size()) != 2 * c.genus)
    throw std::invalid_argument("config: expected " + std::to_string(2 * c.genus) + " generator matrices");
  if (c.generators.empty() && c.preset.empty()) throw std::invalid_argument("config: give generators or a preset");
  return c;
}

std::string config_to_text(const PipelineConfig& c) {
  json j;
  j["genus"] = c.genus;
  j["target"] = to_string(c.target);
  if (!c.generators.empty()) {
    json gens = json::array();
    for (const Mobius& g : c.generators) {
      json m = json::array();
      for (int k = 0; k < 4; ++k) {
        const Complex z = g.matrix()(k / 2, k % 2);
        if (c.target == Target::H2)
          m.push_back(z.real());
        else
          m.push_back({z.real(), z.imag()});
      }
      gens.push_back(m);
    }
    j["generators"] = gens;
  } else {
    j["preset"] = c.preset;
  }
  j["mesh"] = {{"subdivision", c.subdivision}};
  j["tol"] = {{"flow", c.tol_flow}, {"newton", c.tol_newton}, {"relator", c.tol_relator},
              {"elementary", c.tol_elementary}, {"geodesic", c.tol_geodesic}};
  j["spectrum"] = {{"maxWordLength", c.max_word_length}, {"criticalRadius", c.critical_radius}};
  j["seed"] = c.seed;
  j["initSpread"] = c.init_spread;
  j["output"] = c.output_dir;
  return j.dump(2) + "\n";
}

Representation config_representation(const PipelineConfig& c, const FundamentalDomainMesh& mesh) {
  Representation rho;
  rho.presentation = SurfaceGroupPresentation(c.genus);
  rho.target = c.target;
  if (!c.generators.empty()) {
    if (static_cast<int>(c.generators.size()) != 2 * c.genus) throw std::invalid_argument("generator count must be 2 genus");
    rho.images = c.generators;
    return rho;
  }
  const Representation& j0 = mesh.base_holonomy();
  if (c.preset == "base") {
    rho.images = j0.images;
  } else if (c.preset == "trivial") {
    rho.images.assign(static_cast<std::size_t>(2 * c.genus), Mobius());
  } else if (c.preset == "swap") {
    if (c.genus % 2) throw std::invalid_argument("swap preset needs even genus");
    // a_i -> A, b_i -> B for odd i and the reverse for even i; [B, A] = [A, B]^-1.
    const Mobius& a = j0.images[0];
    const Mobius& b = j0.images[1];
    for (int i = 0; i < c.genus; ++i) {
      rho.images.push_back(i % 2 ? b : a);
      rho.images.push_back(i % 2 ? a : b);
    }
  } else {
    throw std::invalid_argument("unknown preset '" + c.preset + "'");
  }
  return rho;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult r;
  r.config = config;
  r.mesh = stage("mesh", [&] { return build_regular_domain(config.genus, config.subdivision); });
  const FundamentalDomainMesh& mesh = r.mesh;
  r.rho = stage("input", [&] { return config_representation(config, mesh); });
  const double relator = r.rho.relator_residual();
  if (relator > config.tol_relator)
    throw StageError("input", "relator residual " + std::to_string(relator) + " exceeds tol.relator");
  if (config.target == Target::H2) {
    for (const Mobius& g : r.rho.images)
      if (!g.is_real(1e-12)) throw StageError("input", "h2 target needs real generator matrices");
    r.euler = stage("euler", [&] { return euler_class(r.rho); });
  }

  // Harmonic map.
  r.orbit = boundary_orbit_analysis(r.rho, config.tol_elementary);
  if (r.orbit.borderline) r.warnings.push_back("boundary orbit analysis was borderline");
  r.elementary_route = r.orbit.trivial || r.orbit.kind != BoundaryOrbitKind::nonelementary;
  EquivariantVertexMap f;
  FlowOptions flow_opts;
  flow_opts.tol = config.tol_flow;
  bool constant = false;
  if (!r.elementary_route) {
    f = random_map(mesh, r.rho, config.seed, config.init_spread);
    r.flow = stage("flow", [&] { return harmonic_flow(mesh, f, flow_opts); });
    if (!r.flow.converged) throw StageError("flow", "not converged: " + r.flow.diagnosis);
  } else if (r.orbit.trivial || r.orbit.kind == BoundaryOrbitKind::finite_orbit_ge3) {
    HPoint p = origin();
    if (!r.orbit.trivial) {
      std::optional<HPoint> fixed;
      for (const Mobius& g : r.rho.images)
        if (g.distance_to_identity() > config.tol_elementary && (fixed = elliptic_fixed_point(g))) break;
      if (!fixed) throw StageError("elementary", "finite orbit without an interior fixed point in H2");
      for (const Mobius& g : r.rho.images)
        if (distance(g.apply(*fixed), *fixed) > 1e-8) throw StageError("elementary", "generators share no fixed point");
      p = *fixed;
    }
    f = orbit_map(mesh, r.rho, p);
    constant = true;
  } else {
    // Busemann construction: m(rho(gamma)) are the periods of a harmonic
    // function h, and x -> ray(-h(x)) is equivariant for the translations by m
    // along the ray, whose lengths |m| are those of rho.
    const auto& pts = r.orbit.points;
    const BusemannRay ray(axis_frame(pts.at(0), pts.size() > 1 ? pts[1] : std::optional<Complex>(pts[0] ? *pts[0] + 1.0 : 0.0)));
    std::vector<double> periods;
    stage("elementary", [&] {
      for (const Mobius& g : r.rho.images) periods.push_back(busemann_cocycle(g, ray, std::max(1e-6, 100.0 * config.tol_elementary)));
      return 0;
    });
    Representation axis = r.rho;
    for (std::size_t i = 0; i < periods.size(); ++i)
      axis.images[i] = ray.frame() * Mobius::diagonal(std::exp(-0.5 * periods[i])) * ray.frame().inverse();
    const double pmax = *std::max_element(periods.begin(), periods.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (std::abs(pmax) <= config.tol_elementary) {
      f = orbit_map(mesh, axis, ray.point_at(0.0));
      constant = true;
    } else {
      const HarmonicOneForm h = stage("elementary", [&] { return harmonic_one_form(mesh, periods); });
      f.rep = axis;
      f.values.resize(mesh.vertex_count());
      for (std::size_t v = 0; v < mesh.vertex_count(); ++v) f.values[v] = ray.point_at(-h.primitive.values[static_cast<Eigen::Index>(v)]);
      r.flow = stage("flow", [&] { return harmonic_flow(mesh, f, flow_opts); });
      if (!r.flow.converged) throw StageError("flow", "not converged: " + r.flow.diagnosis);
    }
  }
  if (constant) {
    r.flow.converged = true;
    r.flow.diagnosis = "constant map";
    r.flow.binding_residual = binding_residual(mesh, f);
  }
  r.energy = total_energy(mesh, f);

  // Hopf differential and H/L of f*g.
  const auto sq = squared_edge_images(mesh, f);
  const FaceForms pull = pullback_components(mesh, sq);
  const PullbackDecomposition dec = stage("hopf", [&] { return decompose(mesh, pull); });
  r.sup_phi = dec.hopf.norm_sq.size() ? std::sqrt(dec.hopf.norm_sq.maxCoeff()) : 0.0;
  r.holomorphicity = holomorphicity_residual(mesh, dec.hopf);
  const VertexPullback vp = stage("hopf", [&] { return recover_vertex_pullback(mesh, f); });

  // Wolf metric g1.
  WolfOptions wopts;
  wopts.tol = config.tol_newton;
  const WolfSolution wolf = stage("wolf", [&] { return solve_wolf_at_vertices(mesh, vp.norm_sq, wopts); });
  if (!wolf.converged) throw StageError("wolf", "Newton did not reach tol.newton");
  r.wolf_residual = wolf.residual;
  r.wolf_iterations = wolf.newton_iters;
  const auto len1 = stage("wolf", [&] { return wolf_edge_lengths(mesh, sq, wolf, vp.e); });
  r.g1_lengths = edge_lengths(mesh, len1);
  for (std::size_t fi = 0; fi < mesh.face_count(); ++fi)
    for (int k = 0; k < 3; ++k) {
      const double l0 = mesh.edge_length(fi, k);
      r.g1_g0_length_deviation = std::max(r.g1_g0_length_deviation, std::abs(r.g1_lengths.averaged[fi][static_cast<std::size_t>(k)] - l0) / l0);
    }
  r.uniformized = stage("holonomy", [&] { return uniformize_lengths(mesh, r.g1_lengths.averaged); });
  if (!r.uniformized.converged) throw StageError("holonomy", "uniformization did not converge");
  const FaceForms g1 = forms_from_lengths(mesh, r.uniformized.lengths);

  // Domination.
  const FaceField H1 = wolf.H1;
  const FaceField L1 = dec.hopf.norm_sq.cwiseQuotient(H1);
  r.comparison = stage("dominate", [&] { return compare_fields(H1, L1, dec.H, dec.L, &dec.degenerate); });
  const LipschitzReport lip = stage("dominate", [&] { return lipschitz_constant(pull, g1); });
  r.lambda_wolf = stage("dominate", [&] {
    return lipschitz_constant(pull, forms_from_lengths(mesh, r.g1_lengths.averaged)).lambda;
  });

  const BetaReport beta = stage("curvature", [&] { return beta_from_pde2(mesh, vp.H, vp.norm_sq); });
  const CurvatureReport k1 = discrete_curvature(mesh, r.g1_lengths.averaged);
  const CurvatureReport kp = discrete_curvature(mesh, sqrt_lengths(sq));
  EdgeLengths l0(mesh.face_count());
  for (std::size_t fi = 0; fi < mesh.face_count(); ++fi)
    for (int k = 0; k < 3; ++k) l0[fi][static_cast<std::size_t>(k)] = mesh.edge_length(fi, k);
  const CurvatureReport k0 = discrete_curvature(mesh, l0);
  CurvatureStats& cs = r.curvature;
  cs.min_beta = beta.coverage > 0.0 ? beta.min_beta : kNaN;
  cs.beta_coverage = beta.coverage;
  cs.kappa_g1_rms = rms_defect(k1);
  cs.kappa_g1_total = k1.total;
  cs.kappa_g0_rms = rms_defect(k0);
  cs.pullback_coverage = kp.coverage;
  double max_kp_defect = kp.coverage > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  int covered = 0, good = 0;
  cs.pullback_min = kp.coverage > 0.0 ? std::numeric_limits<double>::infinity() : kNaN;
  for (Eigen::Index i = 0; i < kp.kappa.size(); ++i) {
    if (!kp.covered[static_cast<std::size_t>(i)]) continue;
    ++covered;
    if (-kp.kappa[i] >= 0.9) ++good;
    cs.pullback_min = std::min(cs.pullback_min, -kp.kappa[i]);
    max_kp_defect = std::max(max_kp_defect, std::abs(kp.kappa[i] + 1.0));
  }
  cs.pullback_fraction = covered ? static_cast<double>(good) / covered : 0.0;

  const ScalarField w = picard_field(wolf.u, vp.H);
  const double K = 2.0 * (wolf.u + vp.L).maxCoeff();
  const PicardReport picard = picard_check(mesh, w, K);
  const bool tg = !constant && detect_totally_geodesic(
      {(dec.H - H1).cwiseAbs().maxCoeff(), beta.coverage > 0.0 ? beta.min_beta : 0.0, max_kp_defect}, config.tol_geodesic);
  r.domination = domination_report(lip, r.comparison, picard, tg, 10.0 * cs.kappa_g1_rms);
  if (!picard.dichotomy_holds) r.warnings.push_back("Picard dichotomy undecided");
  if (picard.hypothesis_violations) r.warnings.push_back("Picard hypothesis violated at " + std::to_string(picard.hypothesis_violations) + " vertices");

  // Holonomy of g1 and length spectrum.
  r.developed = stage("holonomy", [&] { return develop(mesh, r.uniformized.lengths); });
  if (r.developed.relator_residual > 1e-6)
    r.warnings.push_back("developed relator residual " + std::to_string(r.developed.relator_residual));
  r.spectrum = stage("spectrum", [&] {
    return verify_spectrum_domination(r.developed.j, r.rho, r.domination.lambda, config.max_word_length);
  });
  if (config.critical_radius > 0.0)
    r.critical = stage("spectrum", [&] { return critical_exponent_estimate(r.developed.j, config.critical_radius); });
  r.ads_admissible = config.target == Target::H2 && r.domination.strict && r.spectrum.violations.empty();

  // Tables.
  r.faces.resize(mesh.face_count());
  for (std::size_t fi = 0; fi < mesh.face_count(); ++fi) {
    const auto i = static_cast<Eigen::Index>(fi);
    FaceRow& row = r.faces[fi];
    row.e = dec.e[i];
    row.norm_sq = dec.hopf.norm_sq[i];
    row.H2 = dec.H[i];
    row.L2 = dec.L[i];
    row.H1 = H1[i];
    row.L1 = L1[i];
    row.ratio = lip.ratio[i];
    row.degenerate = dec.degenerate[fi];
    row.pullback = pull[fi];
    row.g1 = g1[fi];
  }
  r.vertices.resize(mesh.vertex_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const auto i = static_cast<Eigen::Index>(v);
    r.vertices[v] = {k1.covered[v] ? k1.kappa[i] : kNaN, kp.covered[v] ? kp.kappa[i] : kNaN, beta.beta[i], w[i]};
  }
  return r;
}

int exit_code(const PipelineResult& result) { return result.domination.strict ? 0 : 1; }

}  // namespace fdom
