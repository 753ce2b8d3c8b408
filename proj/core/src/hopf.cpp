#include "fdom/hopf.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

namespace fdom {

FaceForms pullback_components(const FundamentalDomainMesh& mesh, const std::vector<std::array<double, 3>>& squared_lengths) {
  if (squared_lengths.size() != mesh.face_count()) throw std::invalid_argument("one length triple per face required");
  FaceForms out(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Eigen::Vector3d d(squared_lengths[f][0], squared_lengths[f][1], squared_lengths[f][2]);
    out[f] = mesh.frames()[f].edge_to_form * d;
  }
  return out;
}

FaceForms pullback_components(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f) {
  return pullback_components(mesh, squared_edge_images(mesh, f));
}

HopfDifferential extract_hopf(const FundamentalDomainMesh& mesh, const FaceForms& forms) {
  const auto n = static_cast<Eigen::Index>(forms.size());
  HopfDifferential h{ComplexFaceField(n), FaceField(n)};
  for (Eigen::Index f = 0; f < n; ++f) {
    const Eigen::Vector3d& g = forms[static_cast<std::size_t>(f)];
    const Complex phi = 0.25 * Complex(g[0] - g[2], -2.0 * g[1]);
    const double sigma = mesh.frames()[static_cast<std::size_t>(f)].sigma;
    h.phi[f] = phi;
    h.norm_sq[f] = std::norm(phi) / (sigma * sigma);
  }
  return h;
}

FaceForms assemble_form(const FundamentalDomainMesh& mesh, const FaceField& alpha, const ComplexFaceField& phi) {
  FaceForms out(static_cast<std::size_t>(alpha.size()));
  for (Eigen::Index f = 0; f < alpha.size(); ++f) {
    const double a = alpha[f] * mesh.frames()[static_cast<std::size_t>(f)].sigma;
    out[static_cast<std::size_t>(f)] = {a + 2.0 * phi[f].real(), -2.0 * phi[f].imag(), a - 2.0 * phi[f].real()};
  }
  return out;
}

double holomorphicity_residual(const FundamentalDomainMesh& mesh, const HopfDifferential& hopf) {
  double num = 0.0, den = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto [g, kg] = mesh.twin(f, k);
      if (g < f || (g == f && kg < k)) continue;
      const Eigen::Vector2d& ef = mesh.frames()[f].edge[static_cast<std::size_t>(k)];
      const Eigen::Vector2d& eg = mesh.frames()[g].edge[static_cast<std::size_t>(kg)];
      // Chart of g to chart of f: z_f = rot * z_g + c with rot * (-eg) = ef.
      const Complex rot = Complex(ef.x(), ef.y()) / Complex(-eg.x(), -eg.y());
      const Complex unit = rot / std::abs(rot);
      const Complex moved = hopf.phi[static_cast<Eigen::Index>(g)] / (unit * unit);
      const double w = (mesh.frames()[f].area + mesh.frames()[g].area) / 3.0;
      num += w * std::norm(hopf.phi[static_cast<Eigen::Index>(f)] - moved);
      den += w;
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

HL hl_decomposition(const FaceField& e, const FaceField& norm_sq, double tol) {
  if (e.size() != norm_sq.size()) throw std::invalid_argument("field size mismatch");
  HL out{FaceField(e.size()), FaceField(e.size())};
  for (Eigen::Index f = 0; f < e.size(); ++f) {
    const double disc = e[f] * e[f] - 4.0 * norm_sq[f];
    if (disc < -tol * std::max(1.0, e[f] * e[f]))
      throw std::domain_error("pullback not positive semidefinite on face " + std::to_string(f));
    const double root = std::sqrt(std::max(0.0, disc));
    const double h = 0.5 * (e[f] + root);
    out.H[f] = h;
    // L from the product keeps H L = normSq exact when L is tiny.
    out.L[f] = h > 0.0 ? norm_sq[f] / h : 0.0;
  }
  return out;
}

PullbackDecomposition decompose(const FundamentalDomainMesh& mesh, const FaceForms& forms, double degenerate_rel) {
  PullbackDecomposition out;
  out.hopf = extract_hopf(mesh, forms);
  out.e = FaceField(static_cast<Eigen::Index>(forms.size()));
  for (std::size_t f = 0; f < forms.size(); ++f)
    out.e[static_cast<Eigen::Index>(f)] = 0.5 * (forms[f][0] + forms[f][2]) / mesh.frames()[f].sigma;
  auto hl = hl_decomposition(out.e, out.hopf.norm_sq);
  out.H = std::move(hl.H);
  out.L = std::move(hl.L);
  out.degenerate.resize(forms.size());
  for (std::size_t f = 0; f < forms.size(); ++f) {
    const auto i = static_cast<Eigen::Index>(f);
    out.degenerate[f] = out.H[i] - out.L[i] <= degenerate_rel * (out.H[i] + out.L[i]);
  }
  return out;
}

VertexPullback recover_vertex_pullback(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f, int depth) {
  const std::size_t nv = mesh.vertex_count();
  if (f.values.size() != nv) throw std::invalid_argument("map size mismatch");
  const auto rings = neighborhoods(mesh, depth);
  const auto n = static_cast<Eigen::Index>(nv);
  VertexPullback out{Eigen::VectorXcd(n), ScalarField(n), ScalarField(n), ScalarField(n), ScalarField(n)};
  const Eigen::Vector4d lorentz(1.0, 1.0, 1.0, -1.0);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& ring = rings[v];
    const auto m = static_cast<Eigen::Index>(ring.size());
    if (m < 5) throw std::runtime_error("vertex pullback: neighbourhood too small");
    const HPoint& y0 = f.values[v];
    Eigen::MatrixXd a(m, 5), y(m, 4);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& l = ring[static_cast<std::size_t>(i)];
      const Eigen::Vector2d c = normal_coordinates(mesh.vertices()[v], l.transform.apply(mesh.vertices()[static_cast<std::size_t>(l.vertex)]));
      a.row(i) << c.x(), c.y(), c.x() * c.x(), c.x() * c.y(), c.y() * c.y();
      const HPoint image = evaluate(f.rep, l.word).lorentz() * f.values[static_cast<std::size_t>(l.vertex)];
      y.row(i) = log_map(y0, image).transpose();
    }
    const Eigen::MatrixXd coef = a.colPivHouseholderQr().solve(y);
    const Eigen::Matrix<double, 4, 2> d = coef.topRows(2).transpose();
    const Eigen::Matrix2d g = d.transpose() * lorentz.asDiagonal() * d;
    const auto i = static_cast<Eigen::Index>(v);
    out.e[i] = 0.5 * g.trace();
    out.phi[i] = 0.25 * Complex(g(0, 0) - g(1, 1), -2.0 * g(0, 1));
    out.norm_sq[i] = std::norm(out.phi[i]);
  }
  auto hl = hl_decomposition(out.e, out.norm_sq);
  out.H = std::move(hl.H);
  out.L = std::move(hl.L);
  return out;
}

}  // namespace fdom
