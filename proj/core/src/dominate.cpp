#include "fdom/dominate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdom {

FieldComparison compare_fields(const FaceField& H1, const FaceField& L1, const FaceField& H2, const FaceField& L2,
                               const std::vector<bool>* degenerate, double product_tol) {
  const Eigen::Index n = H1.size();
  if (L1.size() != n || H2.size() != n || L2.size() != n) throw std::invalid_argument("field size mismatch");
  if (degenerate && static_cast<Eigen::Index>(degenerate->size()) != n) throw std::invalid_argument("flag size mismatch");
  FieldComparison out;
  out.h_below.resize(static_cast<std::size_t>(n));
  out.e_below.resize(static_cast<std::size_t>(n));
  out.min_gap_h = n ? std::numeric_limits<double>::infinity() : 0.0;
  for (Eigen::Index f = 0; f < n; ++f) {
    const double p1 = H1[f] * L1[f], p2 = H2[f] * L2[f];
    const double mismatch = std::abs(p1 - p2) / std::max(1.0, std::abs(p1));
    out.hl_mismatch = std::max(out.hl_mismatch, mismatch);
    if (mismatch > product_tol)
      throw std::logic_error("pipeline inconsistency: H L products differ on face " + std::to_string(f));
    double h2 = H2[f], l2 = L2[f];
    if (degenerate && (*degenerate)[static_cast<std::size_t>(f)]) h2 = l2 = std::sqrt(std::max(0.0, p2));
    out.min_gap_h = std::min(out.min_gap_h, H1[f] - h2);
    out.h_below[static_cast<std::size_t>(f)] = h2 < H1[f];
    out.e_below[static_cast<std::size_t>(f)] = h2 + l2 < H1[f] + L1[f];
  }
  return out;
}

double max_generalized_eigenvalue(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  // det(A - mu B) = det B mu^2 - (a11 b22 + a22 b11 - 2 a12 b12) mu + det A.
  const double db = b[0] * b[2] - b[1] * b[1];
  if (!(b[0] > 0.0 && db > 0.0)) throw std::domain_error("metric not positive definite");
  const double da = a[0] * a[2] - a[1] * a[1];
  const double mid = a[0] * b[2] + a[2] * b[0] - 2.0 * a[1] * b[1];
  const double disc = std::max(0.0, mid * mid - 4.0 * db * da);
  return (mid + std::sqrt(disc)) / (2.0 * db);
}

LipschitzReport lipschitz_constant(const FaceForms& pullback, const FaceForms& g1) {
  if (pullback.size() != g1.size()) throw std::invalid_argument("form count mismatch");
  LipschitzReport out;
  out.ratio = FaceField(static_cast<Eigen::Index>(g1.size()));
  double mx = 0.0;
  for (std::size_t f = 0; f < g1.size(); ++f) {
    double mu = 0.0;
    try {
      mu = max_generalized_eigenvalue(pullback[f], g1[f]);
    } catch (const std::domain_error&) {
      throw std::domain_error("g1 not positive definite on face " + std::to_string(f));
    }
    out.ratio[static_cast<Eigen::Index>(f)] = mu;
    mx = std::max(mx, mu);
  }
  out.lambda = std::sqrt(std::max(0.0, mx));
  return out;
}

ScalarField picard_field(const ScalarField& H1, const ScalarField& H2) {
  if (H1.size() != H2.size()) throw std::invalid_argument("field size mismatch");
  ScalarField w(H1.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::log(std::max(H2[i], 1e-300) / H1[i]);
  return w;
}

PicardReport picard_check(const FundamentalDomainMesh& mesh, const ScalarField& w, double K, double tol, double slack) {
  if (static_cast<std::size_t>(w.size()) != mesh.vertex_count()) throw std::invalid_argument("w must be a vertex field");
  PicardReport rep;
  rep.K = K;
  rep.max_w = w.maxCoeff();
  rep.sup_abs_w = w.cwiseAbs().maxCoeff();
  const ScalarField lw = laplacian(mesh).apply(w);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double deficit = K * w[i] - slack - lw[i];
    if (deficit > 0.0) {
      ++rep.hypothesis_violations;
      rep.worst_violation = std::max(rep.worst_violation, deficit);
    }
  }
  if (rep.sup_abs_w <= tol)
    rep.branch = "zero";
  else if (rep.max_w < -tol)
    rep.branch = "negative";
  else
    rep.branch = "undecided";
  rep.dichotomy_holds = rep.branch != "undecided";
  return rep;
}

bool detect_totally_geodesic(const GeodesicInputs& in, double tol) {
  return in.sup_h_difference <= tol && in.min_beta >= 1.0 - tol && in.max_kappa_defect <= tol;
}

DominationReport domination_report(const LipschitzReport& lip, const FieldComparison& cmp, const PicardReport& picard,
                                   bool totally_geodesic, double margin) {
  DominationReport r;
  r.lambda = lip.lambda;
  r.min_gap_h = cmp.min_gap_h;
  r.margin = margin;
  r.totally_geodesic = totally_geodesic;
  r.strict = !totally_geodesic && lip.lambda < 1.0 - margin;
  r.per_face_ratio = lip.ratio;
  r.picard = picard;
  return r;
}

}  // namespace fdom
