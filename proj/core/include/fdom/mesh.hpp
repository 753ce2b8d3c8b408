#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fdom/group.hpp"
#include "fdom/isometry.hpp"

namespace fdom {

/// Identification of two sides of the fundamental polygon: `word` maps the
/// points of `from_chain` onto `to_chain` (index-wise), and side `from_side`
/// onto side `to_side`.
struct SidePairing {
  int generator = 0;
  int from_side = 0;
  int to_side = 0;
  Word word;
  std::vector<int> from_chain;  // domain point ids
  std::vector<int> to_chain;
};

/// Face corner on the closed surface: the developed position is
/// j0(deck) * vertex.
struct Corner {
  int vertex = 0;
  int deck = 0;
  friend bool operator==(const Corner&, const Corner&) = default;
};

/// Isometric Euclidean chart of one face built from its g0 edge lengths.
/// Corner k sits at `corner[k]`; edge k is opposite corner k.
struct FaceFrame {
  std::array<Eigen::Vector2d, 3> corner;
  std::array<Eigen::Vector2d, 3> edge;    // corner[k+2] - corner[k+1]
  std::array<double, 3> cot{};            // cot of the chart angle at corner k
  double chart_area = 0.0;                // Euclidean area of the chart triangle
  double area = 0.0;                      // exact hyperbolic (g0) area
  double sigma = 1.0;                     // conformal factor of g0 in the chart
  Eigen::Matrix3d edge_to_form;           // squared edge lengths -> (Gxx, Gxy, Gyy)
};

/// Triangulated closed hyperbolic surface presented by a regular 4g-gon with
/// its side pairings. Faces are triangles of corners (vertex, deck); all
/// corner positions of a face lie in one common lift. The unidentified
/// polygon points ("domain points") are kept for export and side chains.
class FundamentalDomainMesh {
public:
  int genus() const { return genus_; }
  int subdivision() const { return subdivision_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  std::size_t domain_point_count() const { return domain_points_.size(); }

  const std::vector<HPoint>& vertices() const { return vertices_; }
  const std::vector<HPoint>& domain_points() const { return domain_points_; }
  int rep(int domain_point) const { return domain_rep_[static_cast<std::size_t>(domain_point)]; }
  int deck(int domain_point) const { return domain_deck_[static_cast<std::size_t>(domain_point)]; }
  const std::vector<std::array<Corner, 3>>& faces() const { return faces_; }
  /// Representative vertex ids of a face's corners.
  std::array<int, 3> face_vertices(std::size_t f) const;
  /// Developed g0 position of a face corner.
  HPoint corner_position(std::size_t f, int k) const;

  /// Face and local edge index of the other side of edge k of face f.
  std::pair<std::size_t, int> twin(std::size_t f, int k) const { return twin_[f][static_cast<std::size_t>(k)]; }
  /// Deck word taking the twin face's lift to the lift adjacent to face f
  /// across edge k.
  Word transition(std::size_t f, int k) const;

  const std::vector<Word>& decks() const { return decks_; }
  const std::vector<Mobius>& deck_holonomy() const { return deck_holonomy_; }
  const std::vector<SidePairing>& pairings() const { return pairings_; }
  const Representation& base_holonomy() const { return base_holonomy_; }

  const std::vector<FaceFrame>& frames() const { return frames_; }
  const std::vector<double>& vertex_area() const { return vertex_area_; }
  /// g0 length of edge k of face f.
  double edge_length(std::size_t f, int k) const { return edge_length_[f][static_cast<std::size_t>(k)]; }
  /// Dirichlet energy weight of edge k of face f: E = sum w * length^2.
  double edge_weight(std::size_t f, int k) const { return edge_weight_[f][static_cast<std::size_t>(k)]; }
  double total_area() const;
  double mean_edge_weight() const;

  /// Hyperbolic angle sum at each representative vertex (2 pi for a closed surface).
  std::vector<double> angle_sums() const;
  bool is_boundary_point(int domain_point) const { return !domain_sides_[static_cast<std::size_t>(domain_point)].empty(); }

  friend FundamentalDomainMesh build_regular_domain(int genus, int subdivision);

private:
  int genus_ = 2;
  int subdivision_ = 0;
  std::vector<HPoint> vertices_;
  std::vector<HPoint> domain_points_;
  std::vector<std::vector<int>> domain_sides_;
  std::vector<int> domain_rep_;
  std::vector<int> domain_deck_;
  std::vector<std::array<Corner, 3>> faces_;
  std::vector<std::array<std::pair<std::size_t, int>, 3>> twin_;
  std::vector<Word> decks_;
  std::vector<Mobius> deck_holonomy_;
  std::vector<SidePairing> pairings_;
  Representation base_holonomy_;
  std::vector<FaceFrame> frames_;
  std::vector<std::array<double, 3>> edge_length_;
  std::vector<std::array<double, 3>> edge_weight_;
  std::vector<double> vertex_area_;
};

/// Regular 4g-gon centred at the disk origin with vertex angles 2pi/4g, fan
/// triangulated from the centre (4g faces) and refined `subdivision` times by
/// geodesic midpoint splitting, giving 4g * 4^subdivision faces; then made
/// intrinsically Delaunay (nonnegative cotangent edge weights) by edge flips
/// on the closed surface, which preserves the face count. Generator
/// a_i maps side 4i+2 onto side 4i and b_i maps side 4i+1 onto side 4i+3.
FundamentalDomainMesh build_regular_domain(int genus, int subdivision);

/// Per-vertex scalar field.
using ScalarField = Eigen::VectorXd;
/// Per-face scalar field.
using FaceField = Eigen::VectorXd;
/// Per-face complex field expressed in each face's chart.
using ComplexFaceField = Eigen::VectorXcd;

/// Cotangent Laplacian Delta_0 = M^-1 L on representative vertices.
struct Laplacian {
  Eigen::SparseMatrix<double> stiffness;  // L: symmetric, negative semidefinite, rows sum to 0
  Eigen::VectorXd mass;                   // lumped g0 vertex areas

  ScalarField apply(const ScalarField& u) const;
};

/// Throws std::runtime_error on a degenerate chart angle (< 1e-6).
Laplacian laplacian(const FundamentalDomainMesh& mesh);

/// Area-weighted integral of a vertex field.
double integrate(const FundamentalDomainMesh& mesh, const ScalarField& field);
/// Area-weighted integral of a face field.
double integrate_faces(const FundamentalDomainMesh& mesh, const FaceField& field);
/// Face values averaged onto vertices with area weights.
ScalarField faces_to_vertices(const FundamentalDomainMesh& mesh, const FaceField& field);
/// Mean of the three corner values.
FaceField vertices_to_faces(const FundamentalDomainMesh& mesh, const ScalarField& field);

/// Vertex lifted into the sheet of another: position transform * vertices()[vertex],
/// with transform = j0(word).
struct LiftedVertex {
  int vertex = 0;
  Word word;
  Mobius transform;
};

/// For each representative vertex, the distinct lifted vertices reachable by
/// at most `depth` edges, excluding the vertex itself.
std::vector<std::vector<LiftedVertex>> neighborhoods(const FundamentalDomainMesh& mesh, int depth);

/// Orthonormal basis of the tangent plane of H2 (the y = 0 slice) at x.
std::array<HTangent, 2> tangent_basis(const HPoint& x);
/// Geodesic normal coordinates of p centred at x in tangent_basis(x).
Eigen::Vector2d normal_coordinates(const HPoint& x, const HPoint& p);

/// Pointwise Laplace-Beltrami at each vertex from a least-squares quadratic
/// fit over the depth-ring in normal coordinates, where the g0 Laplacian at
/// the centre is the flat one. Consistent on irregular stars, unlike the
/// cotangent operator.
ScalarField fitted_laplacian(const FundamentalDomainMesh& mesh, const ScalarField& field, int depth = 3);
/// The same operator as a sparse matrix (not symmetric).
Eigen::SparseMatrix<double> fitted_laplacian_matrix(const FundamentalDomainMesh& mesh, int depth = 3);

/// Line-oriented text export: header, vertices (disk coordinates), domain
/// points, faces and pairing words.
void write_mesh(std::ostream& os, const FundamentalDomainMesh& mesh);

}  // namespace fdom
