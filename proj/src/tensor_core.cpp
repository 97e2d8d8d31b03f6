#include "eqf/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "eqf/errors.hpp"
#include "eqf/random.hpp"

namespace eqf {

namespace {

std::size_t power4(int m) {
  const auto s = static_cast<std::size_t>(m);
  return s * s * s * s;
}

void require_dimension(int n) {
  if (n < 1 || n > 8) {
    throw DimensionError("sphere dimension must lie in [1, 8], got " + std::to_string(n));
  }
}

struct Indexer {
  int m;
  std::size_t operator()(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * m + j) * m + k) * m + l;
  }
};

}  // namespace

double SymmetryResiduals::max() const {
  return std::max({antisym_first, antisym_second, pair, bianchi});
}

SymmetryResiduals validate(int n, std::span<const double> c) {
  const int m = n + 1;
  if (n < 1 || c.size() != power4(m)) {
    throw DimensionError("coefficient array has " + std::to_string(c.size()) +
                         " entries, expected (n+1)^4 for n = " + std::to_string(n));
  }
  const Indexer at{m};
  SymmetryResiduals r;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          const double x = c[at(i, j, k, l)];
          r.antisym_first = std::max(r.antisym_first, std::abs(x + c[at(j, i, k, l)]));
          r.antisym_second = std::max(r.antisym_second, std::abs(x + c[at(i, j, l, k)]));
          r.pair = std::max(r.pair, std::abs(x - c[at(k, l, i, j)]));
          r.bianchi = std::max(
              r.bianchi, std::abs(x + c[at(i, k, l, j)] + c[at(i, l, j, k)]));
        }
      }
    }
  }
  return r;
}

CurvatureTensor CurvatureTensor::zero(int n) {
  require_dimension(n);
  return CurvatureTensor(n, std::vector<double>(power4(n + 1), 0.0));
}

CurvatureTensor CurvatureTensor::from_coeffs(int n, std::vector<double> coeffs,
                                             double tolerance) {
  require_dimension(n);
  const SymmetryResiduals res = validate(n, coeffs);
  if (res.max() > tolerance) {
    throw DomainError("coefficients violate curvature symmetries (max residual " +
                      std::to_string(res.max()) + ")");
  }
  return CurvatureTensor(n, std::move(coeffs));
}

double CurvatureTensor::evaluate(const Vec& x, const Vec& y, const Vec& z,
                                 const Vec& w) const {
  return contract_first(y, z, w).dot(x);
}

Vec CurvatureTensor::contract_first(const Vec& y, const Vec& z, const Vec& w) const {
  const int m = dim();
  Vec out = Vec::Zero(m);
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double yz = y[j] * z[k];
        double inner = 0.0;
        for (int l = 0; l < m; ++l) inner += coeffs_[idx++] * w[l];
        acc += yz * inner;
      }
    }
    out[i] = acc;
  }
  return out;
}

Mat CurvatureTensor::sandwich(const Vec& p) const {
  const int m = dim();
  Mat out = Mat::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int c = 0; c < m; ++c) {
      const double pp = p[a] * p[c];
      if (pp == 0.0) continue;
      for (int b = 0; b < m; ++b) {
        for (int d = 0; d < m; ++d) out(b, d) += pp * (*this)(a, b, c, d);
      }
    }
  }
  return out;
}

CurvatureTensor& CurvatureTensor::operator+=(const CurvatureTensor& other) {
  if (other.n_ != n_) throw DimensionError("curvature tensor dimension mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

CurvatureTensor& CurvatureTensor::operator-=(const CurvatureTensor& other) {
  if (other.n_ != n_) throw DimensionError("curvature tensor dimension mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

CurvatureTensor& CurvatureTensor::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

double CurvatureTensor::max_abs() const {
  double r = 0.0;
  for (double c : coeffs_) r = std::max(r, std::abs(c));
  return r;
}

double CurvatureTensor::max_abs_diff(const CurvatureTensor& other) const {
  if (other.n_ != n_) throw DimensionError("curvature tensor dimension mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    r = std::max(r, std::abs(coeffs_[i] - other.coeffs_[i]));
  }
  return r;
}

double CurvatureTensor::frobenius_dot(const CurvatureTensor& other) const {
  if (other.n_ != n_) throw DimensionError("curvature tensor dimension mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) r += coeffs_[i] * other.coeffs_[i];
  return r;
}

GroupElement::GroupElement(Mat matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2) {
    throw DimensionError("group element must be a square matrix of size >= 2");
  }
  det_ = matrix_.determinant();
  if (!(std::abs(det_) > 1e-12)) {
    throw DomainError("group element is singular (|det| <= 1e-12)");
  }
}

GroupElement GroupElement::identity(int n) { return GroupElement(Mat::Identity(n + 1, n + 1)); }

SkewMatrix::SkewMatrix(Mat matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw DimensionError("skew matrix must be square");
  const double residual = (matrix_ + matrix_.transpose()).cwiseAbs().maxCoeff();
  if (residual > 1e-14) {
    throw DomainError("matrix is not skew-symmetric (residual " + std::to_string(residual) +
                      ")");
  }
}

SkewMatrix SkewMatrix::elementary(int n, int i, int j) {
  Mat m = Mat::Zero(n + 1, n + 1);
  m(i, j) = 1.0;
  m(j, i) = -1.0;
  return SkewMatrix(std::move(m));
}

CurvatureTensor project_algebraic(int n, std::span<const double> raw) {
  require_dimension(n);
  const int m = n + 1;
  if (raw.size() != power4(m)) throw DimensionError("raw array must have (n+1)^4 entries");
  const Indexer at{m};
  std::vector<double> s(raw.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          const double a = raw[at(i, j, k, l)] - raw[at(j, i, k, l)] -
                           raw[at(i, j, l, k)] + raw[at(j, i, l, k)];
          const double b = raw[at(k, l, i, j)] - raw[at(l, k, i, j)] -
                           raw[at(k, l, j, i)] + raw[at(l, k, j, i)];
          s[at(i, j, k, l)] = (a + b) / 8.0;
        }
      }
    }
  }
  // s lies in S^2(Lambda^2); subtracting the cyclic average over the last three
  // slots removes its Lambda^4 component.
  std::vector<double> out(raw.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          const double cyc = (s[at(i, j, k, l)] + s[at(i, k, l, j)] + s[at(i, l, j, k)]) / 3.0;
          out[at(i, j, k, l)] = s[at(i, j, k, l)] - cyc;
        }
      }
    }
  }
  return CurvatureTensor(n, std::move(out));
}

int curv_dimension(int n) {
  const int m = n + 1;
  return m * m * (m * m - 1) / 12;
}

namespace {

std::vector<CurvatureTensor> build_basis(int n) {
  const int m = n + 1;
  const Indexer at{m};
  std::vector<CurvatureTensor> basis;
  std::vector<double> elementary(power4(m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = i; k < m; ++k) {
        for (int l = k + 1; l < m; ++l) {
          if (k == i && l < j) continue;  // (i,j) <= (k,l) lexicographically
          const std::size_t idx = at(i, j, k, l);
          elementary[idx] = 1.0;
          CurvatureTensor t = project_algebraic(n, elementary);
          elementary[idx] = 0.0;
          const double norm0 = std::sqrt(t.frobenius_dot(t));
          if (norm0 == 0.0) continue;
          for (int pass = 0; pass < 2; ++pass) {
            for (const CurvatureTensor& b : basis) t -= t.frobenius_dot(b) * b;
          }
          const double norm = std::sqrt(t.frobenius_dot(t));
          if (norm > 1e-8 * norm0) {
            t *= 1.0 / norm;
            basis.push_back(std::move(t));
          }
        }
      }
    }
  }
  return basis;
}

}  // namespace

const std::vector<CurvatureTensor>& curv_basis(int n) {
  require_dimension(n);
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const std::vector<CurvatureTensor>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<const std::vector<CurvatureTensor>>(build_basis(n)))
             .first;
  }
  return *it->second;
}

Vec basis_coordinates(const CurvatureTensor& r) {
  const auto& basis = curv_basis(r.n());
  Vec c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    c[static_cast<Eigen::Index>(i)] = r.frobenius_dot(basis[i]);
  }
  return c;
}

CurvatureTensor from_basis_coordinates(int n, const Vec& coords) {
  const auto& basis = curv_basis(n);
  if (coords.size() != static_cast<Eigen::Index>(basis.size())) {
    throw DimensionError("coordinate vector length does not match dim Curv");
  }
  CurvatureTensor out = CurvatureTensor::zero(n);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out += coords[static_cast<Eigen::Index>(i)] * basis[i];
  }
  return out;
}

Projection project_onto_basis(int n, std::span<const double> raw) {
  require_dimension(n);
  if (raw.size() != power4(n + 1)) throw DimensionError("raw array must have (n+1)^4 entries");
  const auto& basis = curv_basis(n);
  Vec c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const auto bc = basis[b].coeffs();
    double dot = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) dot += raw[i] * bc[i];
    c[static_cast<Eigen::Index>(b)] = dot;
  }
  Projection out{from_basis_coordinates(n, c), 0.0};
  const auto pc = out.tensor.coeffs();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.residual = std::max(out.residual, std::abs(raw[i] - pc[i]));
  }
  return out;
}

double sectional(const CurvatureTensor& r, const Vec& x, const Vec& y) {
  if (x.size() != r.dim() || y.size() != r.dim()) {
    throw DimensionError("plane vectors must live in R^(n+1)");
  }
  const double gram = x.squaredNorm() * y.squaredNorm() - x.dot(y) * x.dot(y);
  if (!(gram > 1e-12)) throw DomainError("degenerate plane (Gram determinant <= 1e-12)");
  return r.evaluate(x, y, x, y) / gram;
}

namespace {

void orthonormalize(Vec& x, Vec& y) {
  x.normalize();
  y -= y.dot(x) * x;
  y.normalize();
}

}  // namespace

SectionalMinimum sec_min_estimate(const CurvatureTensor& r, const ProbeOptions& opts) {
  if (opts.restarts < 1) throw DomainError("sec_min_estimate needs at least one restart");
  const int m = r.dim();
  Rng rng(opts.seed);
  SectionalMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  for (int start = 0; start < opts.restarts; ++start) {
    Vec x = rng.unit(m);
    Vec y = rng.gaussian(m);
    orthonormalize(x, y);
    double f = r.evaluate(x, y, x, y);
    for (int it = 0; it < opts.iters; ++it) {
      Vec gx = 2.0 * r.contract_first(y, x, y);
      Vec gy = 2.0 * r.contract_first(x, y, x);
      // tangent part on the Stiefel manifold of orthonormal pairs
      gx -= gx.dot(x) * x + gx.dot(y) * y;
      gy -= gy.dot(x) * x + gy.dot(y) * y;
      if (gx.squaredNorm() + gy.squaredNorm() < 1e-28) break;
      double step = 0.05;
      bool improved = false;
      for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
        Vec xn = x - step * gx;
        Vec yn = y - step * gy;
        orthonormalize(xn, yn);
        const double fn = r.evaluate(xn, yn, xn, yn);
        if (fn < f) {
          x = std::move(xn);
          y = std::move(yn);
          f = fn;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (f < best.value) {
      best.value = f;
      best.x = x;
      best.y = y;
    }
  }
  return best;
}

PositivityProbe is_positive(const CurvatureTensor& r, double margin, const ProbeOptions& opts) {
  if (margin < 0.0) throw DomainError("positivity margin must be non-negative");
  const SectionalMinimum s = sec_min_estimate(r, opts);
  return PositivityProbe{s.value >= margin, s.value, s.x, s.y};
}

CurvatureTensor constant_curvature(int n, double c) {
  require_dimension(n);
  const int m = n + 1;
  const Indexer at{m};
  std::vector<double> coeffs(power4(m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      coeffs[at(i, j, i, j)] = c;
      coeffs[at(i, j, j, i)] = -c;
    }
  }
  return CurvatureTensor::from_coeffs(n, std::move(coeffs));
}

Mat complex_structure(int dim) {
  if (dim % 2 != 0) throw DimensionError("complex structure needs an even dimension");
  Mat j = Mat::Zero(dim, dim);
  for (int a = 0; a < dim; a += 2) {
    j(a + 1, a) = 1.0;
    j(a, a + 1) = -1.0;
  }
  return j;
}

CurvatureTensor fubini_study(int m) {
  if (m < 1) throw DomainError("Fubini-Study tensor needs complex dimension m >= 1");
  const int dim = 2 * m + 2;
  const int n = dim - 1;
  require_dimension(n);
  const Mat J = complex_structure(dim);
  const Indexer at{dim};
  // <J e_a, e_b> = J(b, a)
  auto jp = [&](int a, int b) { return J(b, a); };
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  std::vector<double> coeffs(power4(dim), 0.0);
  for (int x = 0; x < dim; ++x) {
    for (int y = 0; y < dim; ++y) {
      for (int z = 0; z < dim; ++z) {
        for (int w = 0; w < dim; ++w) {
          coeffs[at(x, y, z, w)] = delta(x, z) * delta(y, w) - delta(x, w) * delta(y, z) +
                                   jp(x, z) * jp(y, w) - jp(x, w) * jp(y, z) +
                                   2.0 * jp(x, y) * jp(z, w);
        }
      }
    }
  }
  return CurvatureTensor::from_coeffs(n, std::move(coeffs));
}

CurvatureTensor act(const CurvatureTensor& r, const GroupElement& t) {
  if (t.n() != r.n()) throw DimensionError("group element and tensor dimensions differ");
  const int m = r.dim();
  const Mat& T = t.matrix();
  const Indexer at{m};
  // Contract one slot at a time: out[..a..] = sum_i in[..i..] T(i, a).
  std::vector<double> cur(r.coeffs().begin(), r.coeffs().end());
  std::vector<double> next(cur.size());
  for (int slot = 0; slot < 4; ++slot) {
    for (int i0 = 0; i0 < m; ++i0) {
      for (int i1 = 0; i1 < m; ++i1) {
        for (int i2 = 0; i2 < m; ++i2) {
          for (int a = 0; a < m; ++a) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
              std::size_t idx = 0;
              switch (slot) {
                case 0: idx = at(i, i0, i1, i2); break;
                case 1: idx = at(i0, i, i1, i2); break;
                case 2: idx = at(i0, i1, i, i2); break;
                default: idx = at(i0, i1, i2, i); break;
              }
              acc += cur[idx] * T(i, a);
            }
            std::size_t out = 0;
            switch (slot) {
              case 0: out = at(a, i0, i1, i2); break;
              case 1: out = at(i0, a, i1, i2); break;
              case 2: out = at(i0, i1, a, i2); break;
              default: out = at(i0, i1, i2, a); break;
            }
            next[out] = acc;
          }
        }
      }
    }
    std::swap(cur, next);
  }
  const double scale = std::pow(std::abs(t.det()), -4.0 / static_cast<double>(m));
  if (scale != 1.0) {
    for (double& c : cur) c *= scale;
  }
  return CurvatureTensor(r.n(), std::move(cur));
}

CurvatureTensor random_direction(int n, std::uint64_t seed) {
  const auto& basis = curv_basis(n);
  Rng rng(seed);
  Vec c = rng.gaussian(static_cast<int>(basis.size()));
  c /= c.norm();
  return from_basis_coordinates(n, c);
}

RandomTensor random_positive(int n, std::uint64_t seed, double eps, double margin) {
  if (eps < 0.0) throw DomainError("perturbation size must be non-negative");
  const CurvatureTensor round = constant_curvature(n, 1.0);
  const CurvatureTensor dir = random_direction(n, seed);
  const ProbeOptions probe{12, 400, seed ^ 0x9e3779b97f4a7c15ULL};
  auto build = [&](double e) { return round + e * dir; };
  auto min_sec = [&](const CurvatureTensor& r) { return sec_min_estimate(r, probe).value; };

  CurvatureTensor r = build(eps);
  double value = min_sec(r);
  if (value >= margin) return RandomTensor{std::move(r), eps, value};

  // round itself has minimum 1 >= margin; shrink eps until the probe clears it
  double lo = 0.0;
  double hi = eps;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_sec(build(mid)) >= margin) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r = build(lo);
  value = min_sec(r);
  return RandomTensor{std::move(r), lo, value};
}

}  // namespace eqf
