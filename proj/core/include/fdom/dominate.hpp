#pragma once

#include <string>
#include <vector>

#include "fdom/hopf.hpp"
#include "fdom/mesh.hpp"

namespace fdom {

struct FieldComparison {
  double min_gap_h = 0.0;         // min over faces of H1 - H2
  std::vector<bool> h_below;      // H2 < H1
  std::vector<bool> e_below;      // H2 + L2 < H1 + L1
  double hl_mismatch = 0.0;       // max |H1 L1 - H2 L2| / max(1, H1 L1)
};

/// Per-face comparison of the two H/L decompositions. On faces flagged
/// degenerate (when `degenerate` is given) H2 = L2 = sqrt(H2 L2) is used.
/// Throws std::logic_error when the products H L differ by more than
/// `product_tol` (relative), i.e. the two sides do not share normSq.
FieldComparison compare_fields(const FaceField& H1, const FaceField& L1, const FaceField& H2, const FaceField& L2,
                               const std::vector<bool>* degenerate = nullptr, double product_tol = 1e-8);

/// Largest mu with det(A - mu B) = 0 for symmetric 2x2 forms, B positive definite.
double max_generalized_eigenvalue(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

struct LipschitzReport {
  double lambda = 0.0;
  FaceField ratio;  // per face: largest generalized eigenvalue of f*g against g1
};

/// lambda^2 = max over faces of the largest generalized eigenvalue.
/// Throws std::domain_error when g1 is not positive definite on some face.
LipschitzReport lipschitz_constant(const FaceForms& pullback, const FaceForms& g1);

struct PicardReport {
  double K = 0.0;
  double max_w = 0.0;
  double sup_abs_w = 0.0;
  int hypothesis_violations = 0;  // vertices with Delta_0 w < K w - slack
  double worst_violation = 0.0;
  std::string branch;             // "zero", "negative" or "undecided"
  bool dichotomy_holds = false;
};

/// Checks Delta_0 w >= K w - slack at every vertex and which side of the
/// dichotomy (w == 0 everywhere, or w < 0 everywhere) the field is on:
/// "zero" when sup|w| <= tol, "negative" when max w < -tol.
PicardReport picard_check(const FundamentalDomainMesh& mesh, const ScalarField& w, double K, double tol = 1e-3,
                          double slack = 1e-6);

/// w = log(H2 / H1) with H2 floored at 1e-300 so w stays finite. The
/// constant to pair it with is K = 2 max(H1 + L2).
ScalarField picard_field(const ScalarField& H1, const ScalarField& H2);

struct GeodesicInputs {
  double sup_h_difference = 0.0;   // sup |H2 - H1|
  double min_beta = 0.0;
  double max_kappa_defect = 0.0;   // max |kappa(f*g) + 1| over covered vertices
};

/// True iff all three quantities are within tol of the equality case.
bool detect_totally_geodesic(const GeodesicInputs& in, double tol);

struct DominationReport {
  double lambda = 0.0;
  double min_gap_h = 0.0;
  double margin = 0.0;
  bool strict = false;
  bool totally_geodesic = false;
  FaceField per_face_ratio;
  PicardReport picard;
};

/// strict iff lambda < 1 - margin and the equality case was not detected.
DominationReport domination_report(const LipschitzReport& lip, const FieldComparison& cmp, const PicardReport& picard,
                                   bool totally_geodesic, double margin);

}  // namespace fdom
