#pragma once

#include <array>
#include <vector>

#include "fdom/harmonic.hpp"
#include "fdom/mesh.hpp"

namespace fdom {

/// Symmetric 2-form per face in the face chart, stored as (xx, xy, yy).
using FaceForms = std::vector<Eigen::Vector3d>;

/// Pullback form on each face recovered from the squared lengths of its edge
/// images (exact for the piecewise linear interpolant in the chart).
FaceForms pullback_components(const FundamentalDomainMesh& mesh, const std::vector<std::array<double, 3>>& squared_lengths);
FaceForms pullback_components(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f);

struct HopfDifferential {
  ComplexFaceField phi;  // coefficient of dz^2 in each face chart
  FaceField norm_sq;     // |phi|^2 / sigma^2
};

/// phi = ((g_xx - g_yy) - 2i g_xy) / 4.
HopfDifferential extract_hopf(const FundamentalDomainMesh& mesh, const FaceForms& forms);

/// alpha sigma (dx^2 + dy^2) + phi dz^2 + conj(phi) dzbar^2 on each face.
FaceForms assemble_form(const FundamentalDomainMesh& mesh, const FaceField& alpha, const ComplexFaceField& phi);

/// Area-weighted RMS over interior edges of |phi_f - phi_g e^{-2i theta}|,
/// where theta rotates the chart of g onto the chart of f along the shared edge.
double holomorphicity_residual(const FundamentalDomainMesh& mesh, const HopfDifferential& hopf);

struct PullbackDecomposition {
  FaceField e;
  HopfDifferential hopf;
  FaceField H;
  FaceField L;
  std::vector<bool> degenerate;  // (H - L) <= degeneracy threshold * (H + L)
};

struct HL {
  FaceField H;
  FaceField L;
};

/// Roots of x^2 - e x + normSq. Throws std::domain_error when
/// e^2 - 4 normSq < -tol * max(1, e^2) on some face.
HL hl_decomposition(const FaceField& e, const FaceField& norm_sq, double tol = 1e-10);

/// Energy density, Hopf differential and H/L of a pullback form. Faces with
/// (H - L) <= degenerate_rel * (H + L) are flagged degenerate.
PullbackDecomposition decompose(const FundamentalDomainMesh& mesh, const FaceForms& forms, double degenerate_rel = 1e-6);

/// Pullback quantities at vertices, in geodesic normal coordinates of g0
/// (where sigma = 1).
struct VertexPullback {
  Eigen::VectorXcd phi;  // dz^2 coefficient in normal coordinates
  ScalarField e;
  ScalarField norm_sq;
  ScalarField H;
  ScalarField L;
};

/// Differential of f at each vertex from a least-squares quadratic fit of
/// log_{f(v)} f over the depth-ring in normal coordinates at v. Smoother than
/// averaging the piecewise constant face pullbacks, which is what second
/// derivatives of H need.
VertexPullback recover_vertex_pullback(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f, int depth = 2);

}  // namespace fdom
