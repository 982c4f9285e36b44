#include "polybill/geom.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace polybill {

Curve::Curve(int dim, Map eval, Map deriv, Interval domain, std::optional<double> period)
    : dim_(dim), eval_(std::move(eval)), deriv_(std::move(deriv)), domain_(domain), period_(period) {
  if (dim_ < 2) throw Error(ErrorKind::InvalidArgument, "curve dimension must be >= 2");
  if (period_ && !(*period_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "curve period must be positive");
}

SurfacePatch::SurfacePatch(EvalFn eval, PartialsFn partials, DomainFn in_domain, bool graph_chart)
    : eval_(std::move(eval)),
      partials_(std::move(partials)),
      in_domain_(std::move(in_domain)),
      graph_chart_(graph_chart) {}

SurfacePatch SurfacePatch::graph(std::function<double(const Vec2&)> height,
                                 std::function<Vec2(const Vec2&)> height_gradient, DomainFn in_domain) {
  auto eval = [height](const Vec2& u) { return Vec3(u[0], u[1], height(u)); };
  auto partials = [height_gradient](const Vec2& u) {
    const Vec2 g = height_gradient(u);
    return Partials{Vec3(1.0, 0.0, g[0]), Vec3(0.0, 1.0, g[1])};
  };
  return SurfacePatch(std::move(eval), std::move(partials), std::move(in_domain), true);
}

// --- SkewMatrix -------------------------------------------------------------

SkewMatrix::SkewMatrix(int n) : n_(n), upper_(n > 1 ? n * (n - 1) / 2 : 0, 0.0) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "skew matrix dimension must be >= 2");
}

SkewMatrix SkewMatrix::from_upper(int n, const std::vector<double>& upper) {
  SkewMatrix a(n);
  if (upper.size() != a.upper_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(a.upper_.size()) +
                                                  " upper-triangle entries, got " + std::to_string(upper.size()));
  }
  a.upper_ = upper;
  return a;
}

SkewMatrix SkewMatrix::from_dense(const Mat& dense, double tol) {
  if (dense.rows() != dense.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
  const int n = static_cast<int>(dense.rows());
  SkewMatrix a(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(dense(i, i)) > tol) throw Error(ErrorKind::InvalidArgument, "matrix is not skew-symmetric");
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(dense(i, j) + dense(j, i)) > tol)
        throw Error(ErrorKind::InvalidArgument, "matrix is not skew-symmetric");
      a.set(i, j, dense(i, j));
    }
  }
  return a;
}

SkewMatrix SkewMatrix::rotation_blocks(const std::vector<double>& frequencies) {
  SkewMatrix a(static_cast<int>(2 * frequencies.size()));
  for (size_t k = 0; k < frequencies.size(); ++k) {
    const int i = static_cast<int>(2 * k);
    a.set(i, i + 1, -frequencies[k]);
  }
  return a;
}

int SkewMatrix::index(int i, int j) const {
  // i < j; rows before i contribute (n-1) + (n-2) + ... + (n-i) entries.
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

double SkewMatrix::operator()(int i, int j) const {
  if (i == j) return 0.0;
  if (i < j) return upper_[index(i, j)];
  return -upper_[index(j, i)];
}

void SkewMatrix::set(int i, int j, double value) {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
    throw Error(ErrorKind::InvalidArgument, "invalid skew matrix index");
  if (i < j)
    upper_[index(i, j)] = value;
  else
    upper_[index(j, i)] = -value;
}

Mat SkewMatrix::dense() const {
  Mat m = Mat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      m(i, j) = (*this)(i, j);
      m(j, i) = -m(i, j);
    }
  return m;
}

Vec SkewMatrix::apply(const Vec& x) const {
  if (x.size() != n_) throw Error(ErrorKind::DimensionMismatch, "skew matrix / vector size mismatch");
  Vec y = Vec::Zero(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      const double a = (*this)(i, j);
      y[i] += a * x[j];
      y[j] -= a * x[i];
    }
  return y;
}

SkewMatrix SkewMatrix::transposed() const {
  SkewMatrix t(n_);
  for (size_t k = 0; k < upper_.size(); ++k) t.upper_[k] = -upper_[k];
  return t;
}

// --- exponential -------------------------------------------------------------

namespace {

// Connected components of the nonzero pattern; each component is an
// invariant coordinate subspace of A.
std::vector<std::vector<int>> coupled_blocks(const SkewMatrix& a) {
  const int n = a.dim();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (a(i, j) != 0.0) parent[find(i)] = find(j);

  std::vector<std::vector<int>> blocks;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

Mat exp_series(const Mat& m) {
  constexpr double kTol = 1e-15;
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat scaled = m / std::ldexp(1.0, squarings);

  const auto n = m.rows();
  Mat sum = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k < 60; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= kTol * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace

Mat matrix_exp(const SkewMatrix& a, double t) {
  const int n = a.dim();
  Mat out = Mat::Identity(n, n);
  for (const auto& block : coupled_blocks(a)) {
    if (block.size() == 1) continue;
    if (block.size() == 2) {
      const int i = block[0], j = block[1];
      const double theta = a(i, j) * t;
      const double c = std::cos(theta), s = std::sin(theta);
      out(i, i) = c;
      out(i, j) = s;
      out(j, i) = -s;
      out(j, j) = c;
      continue;
    }
    const int m = static_cast<int>(block.size());
    Mat sub(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) sub(r, c) = a(block[r], block[c]) * t;
    const Mat e = exp_series(sub);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) out(block[r], block[c]) = e(r, c);
  }
  return out;
}

Vec matrix_exp_action(const SkewMatrix& a, double t, const Vec& x0) {
  if (x0.size() != a.dim()) throw Error(ErrorKind::DimensionMismatch, "exp(At) x0: size mismatch");
  return matrix_exp(a, t) * x0;
}

Vec unit_tangent(const Curve& curve, double t) {
  const Vec d = curve.deriv(t);
  const double norm = d.norm();
  if (!(norm > 1e-12)) throw Error(ErrorKind::DegenerateTangent, "|curve'(t)| <= 1e-12 at t = " + std::to_string(t));
  return d / norm;
}

Vec3 surface_normal(const SurfacePatch& patch, const Vec2& u) {
  const Partials p = patch.partials(u);
  const Vec3 n = p.r_u1.cross(p.r_u2);
  const double norm = n.norm();
  if (!(norm > 1e-12)) throw Error(ErrorKind::DegenerateNormal, "|r_u1 x r_u2| <= 1e-12");
  return n / norm;
}

}  // namespace polybill
