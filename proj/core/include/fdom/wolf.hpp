#pragma once

#include <string>
#include <vector>

#include "fdom/hopf.hpp"
#include "fdom/mesh.hpp"

namespace fdom {

struct WolfOptions {
  double tol = 1e-10;  // area-weighted RMS of the discrete equation
  int max_iter = 100;
  bool quadratic_root_start = true;  // false starts from v = 0
};

struct WolfRow {
  int iteration = 0;
  double residual = 0.0;
  int halvings = 0;
};

/// Solution of Delta_0 log u = 2u - 2 normSq / u - 2, collocated at vertices
/// (normSq averaged onto vertices with area weights).
struct WolfSolution {
  ScalarField u;       // per vertex
  ScalarField norm_sq; // per vertex data actually used
  FaceField H1;        // mean of u over the face corners
  FaceField L1;        // face normSq / H1
  double residual = 0.0;
  int newton_iters = 0;
  bool converged = false;
  std::vector<WolfRow> trace;
};

/// Throws std::runtime_error when a Newton step cannot reduce the residual by
/// a factor 1 - 1e-4 within 30 halvings.
WolfSolution solve_wolf(const FundamentalDomainMesh& mesh, const FaceField& norm_sq, const WolfOptions& options = {});
/// Same equation with normSq already given at vertices; L1 = mean of normSq / u over the face.
WolfSolution solve_wolf_at_vertices(const FundamentalDomainMesh& mesh, const ScalarField& norm_sq,
                                    const WolfOptions& options = {});

/// Area-weighted RMS of Delta_0 v - 2 e^v + 2 q e^-v + 2 at vertices.
double wolf_residual(const FundamentalDomainMesh& mesh, const ScalarField& v, const ScalarField& q);

/// g1 = (H1 + L1) g0 + Phi + conj(Phi) per face. Throws std::domain_error when
/// H1 <= L1 on some face.
FaceForms wolf_metric(const FundamentalDomainMesh& mesh, const WolfSolution& sol, const HopfDifferential& hopf);

/// Edge lengths of g1 = f*g + (u + normSq/u - e) g0: the f*g part is the
/// exact squared image length of each edge and the scalar is averaged over
/// the edge's endpoints, so both faces of an edge agree. `e` and the solve's
/// normSq are vertex fields (see recover_vertex_pullback).
std::vector<std::array<double, 3>> wolf_edge_lengths(const FundamentalDomainMesh& mesh,
                                                     const std::vector<std::array<double, 3>>& pullback_sq,
                                                     const WolfSolution& sol, const ScalarField& e);

struct CurvatureReport {
  ScalarField kappa;             // per vertex; NaN where not covered
  std::vector<bool> covered;
  int excluded_faces = 0;
  double coverage = 0.0;         // fraction of covered vertices
  double total = 0.0;            // sum of angle defects over covered vertices
};

/// Angle-defect curvature of a piecewise metric given per face in the charts:
/// (2 pi - sum of corner angles) / (area of the star / 3), with the Euclidean
/// law of cosines on the metric edge lengths (the two faces of an edge may
/// disagree; their mean is used). Faces with a vanishing edge or
/// a collapsed triangle are excluded; vertices with no surviving face are
/// not covered.
CurvatureReport discrete_curvature(const FundamentalDomainMesh& mesh, const FaceForms& metric, double degenerate_tol = 1e-12);
/// Same from edge lengths given per face edge.
CurvatureReport discrete_curvature(const FundamentalDomainMesh& mesh, const std::vector<std::array<double, 3>>& lengths,
                                   double degenerate_tol = 1e-12);

struct BetaReport {
  ScalarField beta;  // per vertex; NaN off the nondegenerate set
  std::vector<bool> covered;
  double min_beta = 0.0;
  double coverage = 0.0;
};

/// beta = (Delta_0 log H2 + 2) / (2 (H2 - normSq / H2)) at vertices with
/// H2 > sqrt(normSq) + gap, where gap = degenerate_rel * (H2 + sqrt(normSq)).
/// Takes vertex fields (see recover_vertex_pullback); Delta_0 is the fitted
/// Laplacian over the 3-ring.
BetaReport beta_from_pde2(const FundamentalDomainMesh& mesh, const ScalarField& H2, const ScalarField& norm_sq,
                          double degenerate_rel = 0.05);

}  // namespace fdom
