#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdom/dominate.hpp"
#include "fdom/harmonic.hpp"
#include "fdom/holonomy.hpp"
#include "fdom/spectrum.hpp"
#include "fdom/wolf.hpp"

namespace fdom {

struct PipelineConfig {
  int genus = 2;
  Target target = Target::H2;
  std::vector<Mobius> generators;  // empty selects `preset`
  std::string preset;              // "base", "trivial" or "swap" when no matrices are given
  int subdivision = 3;
  double tol_flow = -1.0;          // negative: scaled by the mean edge weight
  double tol_newton = 1e-10;
  double tol_relator = 1e-8;
  double tol_elementary = 1e-8;
  double tol_geodesic = 0.05;
  int max_word_length = 8;
  double critical_radius = 0.0;    // 0 disables the critical exponent estimate
  std::uint64_t seed = 1;
  double init_spread = 0.05;       // random displacement of the initial orbit map
  std::string output_dir = ".";
};

/// JSON text: {"genus", "target", "generators": [[a, b, c, d], ...] with
/// complex entries as [re, im], or "preset", "mesh": {"subdivision"},
/// "tol": {"flow", "newton", "relator", "elementary", "geodesic"},
/// "spectrum": {"maxWordLength", "criticalRadius"}, "seed", "output"}.
/// Throws std::invalid_argument on malformed input.
PipelineConfig parse_config(const std::string& text);
std::string config_to_text(const PipelineConfig& config);

/// The representation named by the config, on the regular domain's
/// presentation. Throws std::invalid_argument on an unknown preset or a
/// matrix count other than 2 genus.
Representation config_representation(const PipelineConfig& config, const FundamentalDomainMesh& mesh);

/// Stage failure: `stage` names the pipeline step.
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

struct FaceRow {
  double e = 0.0, norm_sq = 0.0, H2 = 0.0, L2 = 0.0, H1 = 0.0, L1 = 0.0, ratio = 0.0;
  bool degenerate = false;
  Eigen::Vector3d pullback = Eigen::Vector3d::Zero();  // f*g in the face chart
  Eigen::Vector3d g1 = Eigen::Vector3d::Zero();
};

struct VertexRow {
  double kappa_g1 = 0.0;      // NaN where not covered
  double kappa_pullback = 0.0;
  double beta = 0.0;          // NaN off the nondegenerate set
  double w = 0.0;             // log(H2 / H1)
};

struct CurvatureStats {
  double min_beta = 0.0;             // NaN when no vertex is covered
  double beta_coverage = 0.0;
  double kappa_g1_rms = 0.0;         // |kappa(g1) + 1| RMS over covered vertices
  double kappa_g1_total = 0.0;       // sum of angle defects of g1
  double kappa_g0_rms = 0.0;         // same for g0: the angle-defect error floor
  double pullback_coverage = 0.0;
  double pullback_fraction = 0.0;    // covered vertices with -kappa(f*g) >= 0.9
  double pullback_min = 0.0;         // min of -kappa(f*g)
};

struct PipelineResult {
  PipelineConfig config;
  FundamentalDomainMesh mesh;
  Representation rho;
  BoundaryOrbitReport orbit;
  bool elementary_route = false;
  std::optional<int> euler;
  FlowReport flow;
  double energy = 0.0;
  double sup_phi = 0.0;
  double holomorphicity = 0.0;
  double wolf_residual = 0.0;
  int wolf_iterations = 0;
  FieldComparison comparison;
  DominationReport domination;
  CurvatureStats curvature;
  EdgeLengthTable g1_lengths;
  double g1_g0_length_deviation = 0.0;  // max relative |l1 - l0|
  Uniformization uniformized;           // g1 made exactly hyperbolic before developing
  double lambda_wolf = 0.0;             // Lipschitz constant against g1 before the correction
  DevelopedStructure developed;
  SpectrumTable spectrum;
  std::optional<CriticalExponent> critical;
  bool ads_admissible = false;
  std::vector<FaceRow> faces;
  std::vector<VertexRow> vertices;
  std::vector<std::string> warnings;
};

/// Harmonic map, Hopf differential, Wolf metric, domination report, developed
/// holonomy and length spectrum for the configured representation.
/// Elementary representations are routed through the Busemann construction:
/// the map takes values on a geodesic (fixed point or pair) or is constant
/// (finite orbit, trivial). Throws StageError.
PipelineResult run_pipeline(const PipelineConfig& config);

/// 0 strict, 1 non-strict.
int exit_code(const PipelineResult& result);

}  // namespace fdom
