#include "fdom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>

namespace fdom {

namespace {

constexpr double kPi = std::numbers::pi;

Mat2c disk_rotation(double theta) {
  Mat2c m;
  m << std::polar(1.0, theta / 2), 0.0, 0.0, std::polar(1.0, -theta / 2);
  return m;
}

// Translation by `s` along the real diameter of the disk.
Mat2c disk_translation(double s) {
  Mat2c m;
  m << std::cosh(s / 2), std::sinh(s / 2), std::sinh(s / 2), std::cosh(s / 2);
  return m;
}

// Disk automorphism -> PSL(2,R) acting on the upper half-plane.
Mobius from_disk_map(const Mat2c& u) {
  const Complex i(0.0, 1.0);
  Mat2c c;
  c << 1.0, -i, 1.0, i;
  Mat2c m = c.inverse() * u * c;
  m /= std::sqrt(m.determinant());
  // Exact arithmetic gives a real matrix; drop the rounding residue.
  Mat2c re = m.real().cast<Complex>();
  return Mobius(re);
}

double hyperbolic_angle(const HPoint& at, const HPoint& p, const HPoint& q) {
  const HTangent u = log_map(at, p), v = log_map(at, q);
  const double c = lorentz_dot(u, v) / (tangent_norm(u) * tangent_norm(v));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Cotangent of the chart angle opposite the edge (p, q) in triangle (p, q, r).
double chart_cot(const HPoint& p, const HPoint& q, const HPoint& r) {
  const double a = distance(p, r), b = distance(q, r), c = distance(p, q);
  const double cosine = (a * a + b * b - c * c) / (2.0 * a * b);
  const double sine = std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
  return cosine / sine;
}

// Orientation in the Klein model, where geodesics are straight lines.
double klein_orient(const HPoint& a, const HPoint& b, const HPoint& c) {
  const Eigen::Vector2d ka(a[0] / a[3], a[2] / a[3]), kb(b[0] / b[3], b[2] / b[3]), kc(c[0] / c[3], c[2] / c[3]);
  const Eigen::Vector2d u = kb - ka, v = kc - ka;
  return u.x() * v.y() - u.y() * v.x();
}

}  // namespace

std::array<int, 3> FundamentalDomainMesh::face_vertices(std::size_t f) const {
  const auto& t = faces_[f];
  return {t[0].vertex, t[1].vertex, t[2].vertex};
}

HPoint FundamentalDomainMesh::corner_position(std::size_t f, int k) const {
  const Corner& c = faces_[f][static_cast<std::size_t>(k)];
  return deck_holonomy_[static_cast<std::size_t>(c.deck)].apply(vertices_[static_cast<std::size_t>(c.vertex)]);
}

Word FundamentalDomainMesh::transition(std::size_t f, int k) const {
  const auto [g, kg] = twin(f, k);
  const Corner& x = faces_[f][static_cast<std::size_t>((k + 1) % 3)];
  const Corner& gx = faces_[g][static_cast<std::size_t>((kg + 2) % 3)];
  return decks_[static_cast<std::size_t>(x.deck)] * decks_[static_cast<std::size_t>(gx.deck)].inverse();
}

double FundamentalDomainMesh::total_area() const {
  double a = 0.0;
  for (const auto& fr : frames_) a += fr.area;
  return a;
}

double FundamentalDomainMesh::mean_edge_weight() const {
  double s = 0.0;
  for (const auto& w : edge_weight_) s += std::abs(w[0]) + std::abs(w[1]) + std::abs(w[2]);
  return s / (3.0 * static_cast<double>(edge_weight_.size()));
}

std::vector<double> FundamentalDomainMesh::angle_sums() const {
  std::vector<double> sums(vertices_.size(), 0.0);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (int k = 0; k < 3; ++k)
      sums[static_cast<std::size_t>(faces_[f][static_cast<std::size_t>(k)].vertex)] +=
          hyperbolic_angle(corner_position(f, k), corner_position(f, (k + 1) % 3), corner_position(f, (k + 2) % 3));
  }
  return sums;
}

FundamentalDomainMesh build_regular_domain(int genus, int subdivision) {
  if (genus < 2) throw std::invalid_argument("genus must be >= 2");
  if (subdivision < 1) throw std::invalid_argument("subdivision must be >= 1");

  FundamentalDomainMesh mesh;
  mesh.genus_ = genus;
  mesh.subdivision_ = subdivision;
  const int n = 4 * genus;
  const double cot_pi_n = 1.0 / std::tan(kPi / n);
  const double circumradius = std::acosh(cot_pi_n * cot_pi_n);
  const double inradius = std::acosh(cot_pi_n);

  // Side pairings as disk maps: rotate side `from` to angle pi, translate by
  // twice the inradius, rotate onto side `to`.
  auto side_angle = [n](int k) { return (2 * k + 1) * kPi / n; };
  auto pairing_map = [&](int from, int to) {
    return from_disk_map(disk_rotation(side_angle(to)) * disk_translation(2.0 * inradius) *
                         disk_rotation(kPi - side_angle(from)));
  };

  mesh.base_holonomy_.presentation = SurfaceGroupPresentation(genus);
  mesh.base_holonomy_.target = Target::H2;
  mesh.base_holonomy_.images.resize(static_cast<std::size_t>(2 * genus));
  for (int i = 0; i < genus; ++i) {
    SidePairing a{2 * i, 4 * i + 2, 4 * i, Word::generator(2 * i), {}, {}};
    SidePairing b{2 * i + 1, 4 * i + 1, 4 * i + 3, Word::generator(2 * i + 1), {}, {}};
    mesh.base_holonomy_.images[static_cast<std::size_t>(2 * i)] = pairing_map(a.from_side, a.to_side);
    mesh.base_holonomy_.images[static_cast<std::size_t>(2 * i + 1)] = pairing_map(b.from_side, b.to_side);
    mesh.pairings_.push_back(std::move(a));
    mesh.pairings_.push_back(std::move(b));
  }

  // Polygon fan, then midpoint refinement.
  auto& pts = mesh.domain_points_;
  auto& sides = mesh.domain_sides_;
  pts.push_back(origin());
  sides.emplace_back();
  const double disk_r = std::tanh(circumradius / 2);
  for (int k = 0; k < n; ++k) {
    pts.push_back(from_disk(std::polar(disk_r, 2.0 * kPi * k / n)));
    sides.push_back({(k + n - 1) % n, k});
  }
  std::vector<std::array<int, 3>> faces;
  for (int k = 0; k < n; ++k) faces.push_back({0, 1 + k, 1 + (k + 1) % n});

  for (int level = 0; level < subdivision; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const int id = static_cast<int>(pts.size());
      pts.push_back(renormalize(pts[static_cast<std::size_t>(a)] + pts[static_cast<std::size_t>(b)]));
      std::vector<int> common;
      for (int s : sides[static_cast<std::size_t>(a)])
        if (std::count(sides[static_cast<std::size_t>(b)].begin(), sides[static_cast<std::size_t>(b)].end(), s)) common.push_back(s);
      sides.push_back(std::move(common));
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& t : faces) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  // Side identifications.
  const std::size_t np = pts.size();
  auto on_side = [&](std::size_t p, int s) {
    return std::count(sides[p].begin(), sides[p].end(), s) > 0;
  };
  auto find_on_side = [&](const HPoint& x, int s) {
    for (std::size_t q = 0; q < np; ++q)
      if (on_side(q, s) && distance(pts[q], x) < 1e-7) return static_cast<int>(q);
    throw std::runtime_error("side pairing does not match refined boundary points");
  };
  auto side_parameter = [&](std::size_t p, int s) {
    return distance(pts[p], pts[static_cast<std::size_t>(1 + s)]);
  };

  std::vector<int> image_of(np, -1), image_pairing(np, -1);
  for (std::size_t pi = 0; pi < mesh.pairings_.size(); ++pi) {
    auto& pr = mesh.pairings_[pi];
    const Mobius& t = mesh.base_holonomy_.images[static_cast<std::size_t>(pr.generator)];
    std::vector<std::size_t> chain;
    for (std::size_t p = 0; p < np; ++p)
      if (on_side(p, pr.from_side)) chain.push_back(p);
    std::sort(chain.begin(), chain.end(),
              [&](std::size_t x, std::size_t y) { return side_parameter(x, pr.from_side) < side_parameter(y, pr.from_side); });
    for (std::size_t p : chain) {
      const int q = find_on_side(t.apply(pts[p]), pr.to_side);
      pr.from_chain.push_back(static_cast<int>(p));
      pr.to_chain.push_back(q);
      if (sides[p].size() == 1) {
        image_of[p] = q;
        image_pairing[p] = static_cast<int>(pi);
      }
    }
  }

  // Deck words. Corners are chased to P_0 through the pairing graph.
  std::vector<Word> deck_word(np);
  std::vector<bool> has_word(np, false);
  std::vector<int> rep_point(np, -1);  // canonical domain point
  for (std::size_t p = 0; p < np; ++p) {
    if (sides[p].empty() || (sides[p].size() == 1 && image_of[p] < 0)) {
      rep_point[p] = static_cast<int>(p);
      has_word[p] = true;
    }
  }
  for (std::size_t p = 0; p < np; ++p) {
    if (sides[p].size() == 1 && image_of[p] >= 0) {
      const auto& pr = mesh.pairings_[static_cast<std::size_t>(image_pairing[p])];
      rep_point[p] = image_of[p];
      deck_word[p] = pr.word.inverse();
      has_word[p] = true;
    }
  }
  {
    const std::size_t p0 = 1;
    rep_point[p0] = static_cast<int>(p0);
    has_word[p0] = true;
    std::deque<std::size_t> queue{p0};
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (const auto& pr : mesh.pairings_) {
        for (std::size_t i = 0; i < pr.from_chain.size(); ++i) {
          const auto from = static_cast<std::size_t>(pr.from_chain[i]);
          const auto to = static_cast<std::size_t>(pr.to_chain[i]);
          if (sides[from].size() != 2) continue;
          // to = g from, and x = j0(h_x) P_0.
          if (from == x && !has_word[to]) {
            deck_word[to] = pr.word * deck_word[x];
            has_word[to] = true;
            rep_point[to] = static_cast<int>(p0);
            queue.push_back(to);
          } else if (to == x && !has_word[from]) {
            deck_word[from] = pr.word.inverse() * deck_word[x];
            has_word[from] = true;
            rep_point[from] = static_cast<int>(p0);
            queue.push_back(from);
          }
        }
      }
    }
  }

  std::map<std::string, int> deck_index;
  mesh.decks_.push_back(Word());
  deck_index["1"] = 0;
  std::map<int, int> rep_id;
  mesh.domain_rep_.resize(np);
  mesh.domain_deck_.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    if (!has_word[p]) throw std::runtime_error("unidentified boundary point in fundamental domain");
    const int canon = rep_point[p];
    auto it = rep_id.find(canon);
    if (it == rep_id.end()) {
      it = rep_id.emplace(canon, static_cast<int>(mesh.vertices_.size())).first;
      mesh.vertices_.push_back(pts[static_cast<std::size_t>(canon)]);
    }
    mesh.domain_rep_[p] = it->second;
    const std::string key = deck_word[p].to_string();
    auto dit = deck_index.find(key);
    if (dit == deck_index.end()) {
      dit = deck_index.emplace(key, static_cast<int>(mesh.decks_.size())).first;
      mesh.decks_.push_back(deck_word[p]);
    }
    mesh.domain_deck_[p] = dit->second;
  }

  for (const Word& w : mesh.decks_) mesh.deck_holonomy_.push_back(evaluate(mesh.base_holonomy_, w));
  mesh.faces_.reserve(faces.size());
  for (const auto& t : faces) {
    std::array<Corner, 3> c;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto p = static_cast<std::size_t>(t[k]);
      c[k] = {mesh.domain_rep_[p], mesh.domain_deck_[p]};
    }
    mesh.faces_.push_back(c);
  }
  auto intern_deck = [&](const Word& w) {
    const std::string key = w.to_string();
    auto dit = deck_index.find(key);
    if (dit == deck_index.end()) {
      dit = deck_index.emplace(key, static_cast<int>(mesh.decks_.size())).first;
      mesh.decks_.push_back(w);
      mesh.deck_holonomy_.push_back(evaluate(mesh.base_holonomy_, w));
    }
    return dit->second;
  };

  // Lawson flips on the closed surface. An edge is matched with its twin by
  // comparing developed positions after moving both to a common lift.
  auto pos = [&](const Corner& c) {
    return mesh.deck_holonomy_[static_cast<std::size_t>(c.deck)].apply(mesh.vertices_[static_cast<std::size_t>(c.vertex)]);
  };
  auto rebase = [&](std::array<Corner, 3> t) {
    const Word base = mesh.decks_[static_cast<std::size_t>(t[0].deck)].inverse();
    for (auto& c : t) c.deck = intern_deck(base * mesh.decks_[static_cast<std::size_t>(c.deck)]);
    return t;
  };
  auto& F = mesh.faces_;
  for (int sweep = 0; sweep < 1000; ++sweep) {
    struct HalfEdge {
      std::size_t face;
      int k;
      HPoint rel;  // far endpoint with the near endpoint moved to its representative
    };
    std::map<std::pair<int, int>, std::vector<HalfEdge>> by_vertices;
    for (std::size_t f = 0; f < F.size(); ++f)
      for (int k = 0; k < 3; ++k) {
        const Corner& x = F[f][static_cast<std::size_t>((k + 1) % 3)];
        const Corner& y = F[f][static_cast<std::size_t>((k + 2) % 3)];
        // Directed x -> y; the twin runs y -> x, so key by (x, y) and look up (y, x).
        const HPoint rel = mesh.deck_holonomy_[static_cast<std::size_t>(x.deck)].inverse().apply(pos(y));
        by_vertices[{x.vertex, y.vertex}].push_back({f, k, rel});
      }
    std::vector<bool> touched(F.size(), false);
    bool flipped = false;
    for (std::size_t f0 = 0; f0 < F.size(); ++f0) {
      for (int k0 = 0; k0 < 3 && !touched[f0]; ++k0) {
        const Corner x = F[f0][static_cast<std::size_t>((k0 + 1) % 3)];
        const Corner y = F[f0][static_cast<std::size_t>((k0 + 2) % 3)];
        const Corner c = F[f0][static_cast<std::size_t>(k0)];
        // Twin half-edge y -> x: its rel is x seen from y's representative.
        const HPoint want = mesh.deck_holonomy_[static_cast<std::size_t>(y.deck)].inverse().apply(pos(x));
        const HalfEdge* twin = nullptr;
        for (const auto& h : by_vertices[{y.vertex, x.vertex}])
          if (h.face != f0 && distance(h.rel, want) < 1e-7) twin = &h;
        if (!twin) throw std::runtime_error("unmatched edge in fundamental domain mesh");
        const std::size_t f1 = twin->face;
        if (touched[f1]) continue;
        // Transport f1 into f0's lift via its copy of x.
        const Corner x1 = F[f1][static_cast<std::size_t>((twin->k + 2) % 3)];
        const Corner d1 = F[f1][static_cast<std::size_t>(twin->k)];
        const Word gamma = mesh.decks_[static_cast<std::size_t>(x.deck)] * mesh.decks_[static_cast<std::size_t>(x1.deck)].inverse();
        const Corner d{d1.vertex, intern_deck(gamma * mesh.decks_[static_cast<std::size_t>(d1.deck)])};
        const HPoint px = pos(x), py = pos(y), pc = pos(c), pd = pos(d);
        if (chart_cot(px, py, pc) + chart_cot(px, py, pd) >= -1e-12) continue;
        if (klein_orient(pc, px, pd) <= 1e-14 || klein_orient(pd, py, pc) <= 1e-14) continue;
        F[f0] = rebase({c, x, d});
        F[f1] = rebase({d, y, c});
        touched[f0] = touched[f1] = true;
        flipped = true;
      }
    }
    if (!flipped) break;
  }

  // Twins of the final triangulation.
  {
    std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, int>>> by_vertices;
    for (std::size_t f = 0; f < F.size(); ++f)
      for (int k = 0; k < 3; ++k)
        by_vertices[{F[f][static_cast<std::size_t>((k + 1) % 3)].vertex, F[f][static_cast<std::size_t>((k + 2) % 3)].vertex}]
            .emplace_back(f, k);
    mesh.twin_.resize(F.size());
    for (std::size_t f = 0; f < F.size(); ++f)
      for (int k = 0; k < 3; ++k) {
        const Corner x = F[f][static_cast<std::size_t>((k + 1) % 3)];
        const Corner y = F[f][static_cast<std::size_t>((k + 2) % 3)];
        const HPoint want = mesh.deck_holonomy_[static_cast<std::size_t>(y.deck)].inverse().apply(pos(x));
        bool found = false;
        for (const auto& [g, kg] : by_vertices[{y.vertex, x.vertex}]) {
          if (g == f && kg == k) continue;
          const Corner gy = F[g][static_cast<std::size_t>((kg + 1) % 3)];
          const Corner gx = F[g][static_cast<std::size_t>((kg + 2) % 3)];
          const HPoint rel = mesh.deck_holonomy_[static_cast<std::size_t>(gy.deck)].inverse().apply(pos(gx));
          if (distance(rel, want) < 1e-7) {
            mesh.twin_[f][static_cast<std::size_t>(k)] = {g, kg};
            found = true;
            break;
          }
        }
        if (!found) throw std::runtime_error("unmatched edge in fundamental domain mesh");
      }
  }

  // Face charts and weights.
  auto compute_geometry = [&]() {
    const std::size_t nf = mesh.faces_.size();
    mesh.frames_.resize(nf);
    mesh.edge_length_.resize(nf);
    mesh.edge_weight_.resize(nf);
    mesh.vertex_area_.assign(mesh.vertices_.size(), 0.0);
    for (std::size_t f = 0; f < nf; ++f) {
      std::array<HPoint, 3> p;
      for (int k = 0; k < 3; ++k) p[static_cast<std::size_t>(k)] = mesh.corner_position(f, k);
      std::array<double, 3> len{};
      for (int k = 0; k < 3; ++k)
        len[static_cast<std::size_t>(k)] = distance(p[static_cast<std::size_t>((k + 1) % 3)], p[static_cast<std::size_t>((k + 2) % 3)]);
      FaceFrame fr;
      const double c0 = (len[1] * len[1] + len[2] * len[2] - len[0] * len[0]) / (2.0 * len[1] * len[2]);
      const double theta0 = std::acos(std::clamp(c0, -1.0, 1.0));
      fr.corner[0] = {0.0, 0.0};
      fr.corner[1] = {len[2], 0.0};
      fr.corner[2] = {len[1] * std::cos(theta0), len[1] * std::sin(theta0)};
      Eigen::Matrix3d q;
      for (int k = 0; k < 3; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        fr.edge[ku] = fr.corner[static_cast<std::size_t>((k + 2) % 3)] - fr.corner[static_cast<std::size_t>((k + 1) % 3)];
        const Eigen::Vector2d u = fr.corner[static_cast<std::size_t>((k + 1) % 3)] - fr.corner[ku];
        const Eigen::Vector2d v = fr.corner[static_cast<std::size_t>((k + 2) % 3)] - fr.corner[ku];
        const double angle = std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v));
        if (!(angle > 1e-6)) throw std::runtime_error("degenerate triangle in fundamental domain mesh");
        fr.cot[ku] = 1.0 / std::tan(angle);
        q.row(k) << fr.edge[ku].x() * fr.edge[ku].x(), 2.0 * fr.edge[ku].x() * fr.edge[ku].y(), fr.edge[ku].y() * fr.edge[ku].y();
      }
      fr.edge_to_form = q.inverse();
      fr.chart_area = 0.5 * len[1] * len[2] * std::sin(theta0);
      double angle_sum = 0.0;
      for (int k = 0; k < 3; ++k)
        angle_sum += hyperbolic_angle(p[static_cast<std::size_t>(k)], p[static_cast<std::size_t>((k + 1) % 3)], p[static_cast<std::size_t>((k + 2) % 3)]);
      fr.area = kPi - angle_sum;
      const double scale = fr.area / fr.chart_area;
      for (int k = 0; k < 3; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        mesh.edge_length_[f][ku] = len[ku];
        mesh.edge_weight_[f][ku] = 0.25 * scale * fr.cot[ku];
        mesh.vertex_area_[static_cast<std::size_t>(mesh.faces_[f][ku].vertex)] += fr.area / 3.0;
      }
      mesh.frames_[f] = fr;
    }
  };
  compute_geometry();

  return mesh;
}

ScalarField Laplacian::apply(const ScalarField& u) const { return (stiffness * u).cwiseQuotient(mass); }

Laplacian laplacian(const FundamentalDomainMesh& mesh) {
  const auto nv = static_cast<Eigen::Index>(mesh.vertex_count());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.face_count() * 12);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto v = mesh.face_vertices(f);
    for (int k = 0; k < 3; ++k) {
      if (!(mesh.frames()[f].cot[static_cast<std::size_t>(k)] == mesh.frames()[f].cot[static_cast<std::size_t>(k)]))
        throw std::runtime_error("degenerate triangle in Laplacian assembly");
      const int i = v[static_cast<std::size_t>((k + 1) % 3)], j = v[static_cast<std::size_t>((k + 2) % 3)];
      if (i == j) continue;
      const double w = 2.0 * mesh.edge_weight(f, k);
      trip.emplace_back(i, j, w);
      trip.emplace_back(j, i, w);
      trip.emplace_back(i, i, -w);
      trip.emplace_back(j, j, -w);
    }
  }
  Laplacian lap;
  lap.stiffness.resize(nv, nv);
  lap.stiffness.setFromTriplets(trip.begin(), trip.end());
  lap.mass = Eigen::Map<const Eigen::VectorXd>(mesh.vertex_area().data(), nv);
  return lap;
}

double integrate(const FundamentalDomainMesh& mesh, const ScalarField& field) {
  if (static_cast<std::size_t>(field.size()) != mesh.vertex_count()) throw std::invalid_argument("vertex field size mismatch");
  return Eigen::Map<const Eigen::VectorXd>(mesh.vertex_area().data(), field.size()).dot(field);
}

double integrate_faces(const FundamentalDomainMesh& mesh, const FaceField& field) {
  if (static_cast<std::size_t>(field.size()) != mesh.face_count()) throw std::invalid_argument("face field size mismatch");
  double s = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) s += mesh.frames()[f].area * field[static_cast<Eigen::Index>(f)];
  return s;
}

ScalarField faces_to_vertices(const FundamentalDomainMesh& mesh, const FaceField& field) {
  ScalarField out = ScalarField::Zero(static_cast<Eigen::Index>(mesh.vertex_count()));
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const double w = mesh.frames()[f].area / 3.0;
    for (int v : mesh.face_vertices(f)) out[v] += w * field[static_cast<Eigen::Index>(f)];
  }
  for (Eigen::Index v = 0; v < out.size(); ++v) out[v] /= mesh.vertex_area()[static_cast<std::size_t>(v)];
  return out;
}

FaceField vertices_to_faces(const FundamentalDomainMesh& mesh, const ScalarField& field) {
  FaceField out(static_cast<Eigen::Index>(mesh.face_count()));
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto v = mesh.face_vertices(f);
    out[static_cast<Eigen::Index>(f)] = (field[v[0]] + field[v[1]] + field[v[2]]) / 3.0;
  }
  return out;
}

std::vector<std::vector<LiftedVertex>> neighborhoods(const FundamentalDomainMesh& mesh, int depth) {
  if (depth < 1) throw std::invalid_argument("neighborhood depth must be >= 1");
  const std::size_t nv = mesh.vertex_count();
  std::vector<std::vector<LiftedVertex>> ring1(nv), out(nv);
  auto position = [&](const LiftedVertex& l) { return l.transform.apply(mesh.vertices()[static_cast<std::size_t>(l.vertex)]); };
  auto insert = [](std::vector<LiftedVertex>& list, std::vector<HPoint>& seen, LiftedVertex l, const HPoint& x) {
    for (const HPoint& s : seen)
      if ((s - x).norm() < 1e-9) return false;
    seen.push_back(x);
    list.push_back(std::move(l));
    return true;
  };
  std::vector<std::vector<HPoint>> seen1(nv);
  for (std::size_t v = 0; v < nv; ++v) seen1[v].push_back(mesh.vertices()[v]);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto& t = mesh.faces()[f];
    for (int k = 0; k < 3; ++k) {
      const Corner& c = t[static_cast<std::size_t>(k)];
      const Word back = mesh.decks()[static_cast<std::size_t>(c.deck)].inverse();
      const Mobius back_m = mesh.deck_holonomy()[static_cast<std::size_t>(c.deck)].inverse();
      for (int j = 1; j < 3; ++j) {
        const Corner& o = t[static_cast<std::size_t>((k + j) % 3)];
        LiftedVertex l{o.vertex, back * mesh.decks()[static_cast<std::size_t>(o.deck)],
                       back_m * mesh.deck_holonomy()[static_cast<std::size_t>(o.deck)]};
        const HPoint x = position(l);
        insert(ring1[static_cast<std::size_t>(c.vertex)], seen1[static_cast<std::size_t>(c.vertex)], std::move(l), x);
      }
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<HPoint> seen{mesh.vertices()[v]};
    std::vector<LiftedVertex> front;
    for (const auto& l : ring1[v])
      if (insert(out[v], seen, l, position(l))) front.push_back(l);
    for (int d = 1; d < depth; ++d) {
      std::vector<LiftedVertex> next;
      for (const auto& l : front)
        for (const auto& m : ring1[static_cast<std::size_t>(l.vertex)]) {
          LiftedVertex c{m.vertex, l.word * m.word, l.transform * m.transform};
          const HPoint x = position(c);
          if (insert(out[v], seen, c, x)) next.push_back(out[v].back());
        }
      front = std::move(next);
    }
  }
  return out;
}

std::array<HTangent, 2> tangent_basis(const HPoint& x) {
  HTangent e1 = project_tangent(x, HTangent(1.0, 0.0, 0.0, 0.0));
  e1 /= tangent_norm(e1);
  HTangent e2 = project_tangent(x, HTangent(0.0, 0.0, 1.0, 0.0));
  e2 -= lorentz_dot(e2, e1) * e1;
  e2 /= tangent_norm(e2);
  return {e1, e2};
}

Eigen::Vector2d normal_coordinates(const HPoint& x, const HPoint& p) {
  const auto b = tangent_basis(x);
  const HTangent l = log_map(x, p);
  return {lorentz_dot(l, b[0]), lorentz_dot(l, b[1])};
}

ScalarField fitted_laplacian(const FundamentalDomainMesh& mesh, const ScalarField& field, int depth) {
  if (static_cast<std::size_t>(field.size()) != mesh.vertex_count()) throw std::invalid_argument("field size mismatch");
  return fitted_laplacian_matrix(mesh, depth) * field;
}

Eigen::SparseMatrix<double> fitted_laplacian_matrix(const FundamentalDomainMesh& mesh, int depth) {
  const auto rings = neighborhoods(mesh, depth);
  const std::size_t nv = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& ring = rings[v];
    if (ring.size() < 5) throw std::runtime_error("fitted laplacian: neighbourhood too small");
    const auto n = static_cast<Eigen::Index>(ring.size());
    Eigen::MatrixXd a(n + 1, 6);
    a.row(0) << 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& l = ring[static_cast<std::size_t>(i)];
      const Eigen::Vector2d c = normal_coordinates(mesh.vertices()[v], l.transform.apply(mesh.vertices()[static_cast<std::size_t>(l.vertex)]));
      a.row(i + 1) << 1.0, c.x(), c.y(), c.x() * c.x(), c.x() * c.y(), c.y() * c.y();
    }
    // Row of the least-squares solution operator giving 2 (c_xx + c_yy).
    const Eigen::MatrixXd pinv = a.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(n + 1, n + 1));
    const Eigen::RowVectorXd w = 2.0 * (pinv.row(3) + pinv.row(5));
    const auto row = static_cast<int>(v);
    trip.emplace_back(row, row, w[0]);
    for (Eigen::Index i = 0; i < n; ++i) trip.emplace_back(row, ring[static_cast<std::size_t>(i)].vertex, w[i + 1]);
  }
  Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

void write_mesh(std::ostream& os, const FundamentalDomainMesh& mesh) {
  os << std::setprecision(17);
  os << "# fdom fundamental domain mesh\n";
  os << "genus " << mesh.genus() << "\nsubdivision " << mesh.subdivision() << "\n";
  os << "vertices " << mesh.vertex_count() << "\n";
  for (const auto& v : mesh.vertices()) {
    const Complex z = to_disk(v);
    os << z.real() << ' ' << z.imag() << "\n";
  }
  os << "domain_points " << mesh.domain_point_count() << "\n";
  for (std::size_t p = 0; p < mesh.domain_point_count(); ++p) {
    const Complex z = to_disk(mesh.domain_points()[p]);
    os << z.real() << ' ' << z.imag() << ' ' << mesh.rep(static_cast<int>(p)) << ' '
       << mesh.decks()[static_cast<std::size_t>(mesh.deck(static_cast<int>(p)))].to_string() << "\n";
  }
  os << "faces " << mesh.face_count() << "\n";
  for (const auto& t : mesh.faces())
    os << t[0].vertex << ':' << t[0].deck << ' ' << t[1].vertex << ':' << t[1].deck << ' ' << t[2].vertex << ':'
       << t[2].deck << "\n";
  os << "decks " << mesh.decks().size() << "\n";
  for (const auto& w : mesh.decks()) os << w.to_string() << "\n";
  os << "pairings " << mesh.pairings().size() << "\n";
  for (const auto& pr : mesh.pairings()) {
    os << pr.word.to_string() << ' ' << pr.from_side << ' ' << pr.to_side << ' ' << pr.from_chain.size();
    for (std::size_t i = 0; i < pr.from_chain.size(); ++i) os << ' ' << pr.from_chain[i] << ':' << pr.to_chain[i];
    os << "\n";
  }
}

}  // namespace fdom
