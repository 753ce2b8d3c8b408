#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdom/isometry.hpp"
#include "fdom/mesh.hpp"

namespace fdom {

/// rho-equivariant map on the universal cover, stored by its values at the
/// representative vertices. The value at a face corner (v, deck) is
/// rho(deck) f(v), so the bindings f(gamma x) = rho(gamma) f(x) hold by
/// construction for every deck word of the mesh.
struct EquivariantVertexMap {
  Representation rep;
  std::vector<HPoint> values;

  Target target() const { return rep.target; }
};

/// Lorentz matrices of rho(deck) for the decks of a mesh.
std::vector<Eigen::Matrix4d> deck_action(const FundamentalDomainMesh& mesh, const Representation& rho);

/// Squared target distances between the images of the endpoints of each face edge.
std::vector<std::array<double, 3>> squared_edge_images(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f);

/// f(v) = vertex position. Equivariant when rho is the base holonomy.
EquivariantVertexMap identity_map(const FundamentalDomainMesh& mesh, const Representation& rho);
/// Every vertex sent to one point: the orbit map of `base`.
EquivariantVertexMap orbit_map(const FundamentalDomainMesh& mesh, const Representation& rho, const HPoint& base = origin());
/// Orbit map with each vertex displaced by a random tangent vector of norm <= spread.
EquivariantVertexMap random_map(const FundamentalDomainMesh& mesh, const Representation& rho, std::uint64_t seed,
                                double spread = 1.0);

/// Half trace of the pullback in each face chart; nonnegative.
FaceField energy_density(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f);
double total_energy(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f);
/// Negative gradient of total_energy with respect to f(v), in the tangent space at f(v).
std::vector<HTangent> discrete_tension(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f);
/// Riemannian Hessian of total_energy in orthonormal tangent frames (2 per
/// vertex for H2, 3 for H3), ordered vertex-major. `frames` receives the bases.
Eigen::SparseMatrix<double> energy_hessian(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f,
                                           std::vector<std::vector<HTangent>>* frames = nullptr);

/// Max over pairings and chain points of d(f(to), rho(g) f(from)).
double binding_residual(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f);

enum class Schedule { newton, jacobi, gauss_seidel };

struct FlowOptions {
  double tol = -1.0;  // sup |tension|; negative selects 1e-8 * mean edge weight
  int max_iter = 20000;
  Schedule schedule = Schedule::newton;
  double armijo = 1e-4;
  double drift_limit = 50.0;  // distance a vertex may travel before the run is declared escaping
};

struct FlowRow {
  int iteration = 0;
  double energy = 0.0;
  double sup_tension = 0.0;
};

struct FlowReport {
  int iterations = 0;
  double energy = 0.0;
  double sup_tension = 0.0;
  double tolerance = 0.0;
  double binding_residual = 0.0;
  bool converged = false;
  std::string diagnosis;
  std::vector<FlowRow> trace;
};

/// Geodesic descent with Armijo backtracking on E. Jacobi moves all vertices
/// along their tension simultaneously (scaled by the inverse vertex weight);
/// Gauss-Seidel relaxes one vertex at a time in index order; Newton moves
/// along the solution of the Riemannian Hessian system, which is positive
/// semidefinite because E is geodesically convex.
FlowReport harmonic_flow(const FundamentalDomainMesh& mesh, EquivariantVertexMap& f, const FlowOptions& options = {});

/// Real-valued equivariant map: value at corner (v, deck) is h(v) + m(deck).
struct RealValuedMap {
  std::vector<double> periods;  // m on the generators
  std::vector<double> deck_shift;
  ScalarField values;
};

/// Harmonic 1-form in the cohomology class of the generator periods, given by
/// its differences along each face edge (corner k+1 to corner k+2).
struct HarmonicOneForm {
  RealValuedMap primitive;
  std::vector<std::array<double, 3>> edge_values;
  double divergence_residual = 0.0;
  /// Sum of the form along each pairing's chain transversal minus the period.
  double period_residual = 0.0;
};

/// Throws std::runtime_error when the linear solve fails.
HarmonicOneForm harmonic_one_form(const FundamentalDomainMesh& mesh, const std::vector<double>& periods);

}  // namespace fdom
