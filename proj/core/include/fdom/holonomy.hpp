#pragma once

#include <array>
#include <vector>

#include "fdom/hopf.hpp"
#include "fdom/mesh.hpp"

namespace fdom {

using EdgeLengths = std::vector<std::array<double, 3>>;  // edge k of face f, opposite corner k

struct EdgeLengthTable {
  EdgeLengths per_face;   // as computed on each face
  EdgeLengths averaged;   // mean of the two faces of each edge
  double mismatch_rms = 0.0;  // RMS over edges of |l_f - l_g| / mean
};

/// sqrt(e^T G e) for each chart edge e of each face.
EdgeLengthTable edge_lengths(const FundamentalDomainMesh& mesh, const FaceForms& metric);
/// Twin averaging of lengths already given per face.
EdgeLengthTable edge_lengths(const FundamentalDomainMesh& mesh, const EdgeLengths& per_face);

/// Angle opposite c in the hyperbolic triangle with sides a, b, c.
/// Throws std::domain_error unless the strict triangle inequalities hold.
double hyperbolic_law_of_cosines(double a, double b, double c);

/// Orientation-preserving isometry of H2 best matching x_i -> y_i: exact on
/// the first two pairs (point and direction), then one Gauss-Newton step over
/// all pairs. Needs at least two pairs with distinct points.
Mobius fit_isometry(const std::vector<HPoint>& from, const std::vector<HPoint>& to);

struct Uniformization {
  EdgeLengths lengths;            // per face, twins equal
  ScalarField u;                  // per vertex
  double max_angle_defect = 0.0;  // max |2 pi - angle sum| after the solve
  double initial_defect = 0.0;    // the same for the input lengths
  int iterations = 0;
  bool converged = false;
};

/// Discrete conformal change sinh(l'/2) = e^{(u_i + u_j)/2} sinh(l/2) making
/// every hyperbolic vertex angle sum 2 pi (Newton on u from 0). The input
/// lengths of a smooth hyperbolic metric leave u small; its size measures how
/// far the piecewise metric is from being hyperbolic. Throws std::domain_error
/// when the input violates a triangle inequality.
Uniformization uniformize_lengths(const FundamentalDomainMesh& mesh, const EdgeLengths& lengths, double tol = 1e-11,
                                  int max_iter = 60);

struct PairingFit {
  int generator = 0;
  int point_pairs = 0;
  double rms = 0.0;  // RMS of d(j(g) x, y) over the pairs used
};

struct DevelopedStructure {
  std::vector<std::array<HPoint, 3>> corners;  // developed g1 position of each face corner
  std::vector<Word> lift;                      // deck word of the tree copy of each face
  Representation j;
  std::vector<PairingFit> fits;
  double relator_residual = 0.0;
};

/// Lays out the faces in H2 along a breadth-first face tree from `root_face`
/// (edges inside one lift first), using the averaged lengths. The root's
/// corner 0 is placed at the disk origin and its corner 1 on the positive
/// real axis. Each generator image is fitted on the corners of faces met
/// again across an edge whose deck word reduces to that single letter.
/// Throws std::domain_error with the offending faces when a face violates the
/// triangle inequality, and std::runtime_error when a generator has no pairs.
DevelopedStructure develop(const FundamentalDomainMesh& mesh, const EdgeLengths& lengths, std::size_t root_face = 0);

}  // namespace fdom
