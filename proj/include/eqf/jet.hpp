#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <utility>

namespace eqf {

/// Second-order multivariate Taylor jet.
///
/// Carries a value together with its gradient and Hessian with respect to up
/// to kMaxVars independent variables. Arithmetic propagates all three exactly
/// (chain rule), so any smooth expression evaluated on jets yields its closed
/// form first and second partial derivatives.
///
/// The Hessian is stored packed (upper triangle, row major).
class Jet {
 public:
  static constexpr int kMaxVars = 8;
  static constexpr int kPacked = kMaxVars * (kMaxVars + 1) / 2;

  Jet() = default;
  Jet(double value, int nvars) : value_(value), nvars_(nvars) {
    assert(nvars >= 0 && nvars <= kMaxVars);
  }

  /// Independent variable number `index` evaluated at `value`.
  static Jet variable(double value, int index, int nvars) {
    Jet j(value, nvars);
    j.grad_[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  double value() const { return value_; }
  int nvars() const { return nvars_; }
  double grad(int i) const { return grad_[static_cast<std::size_t>(i)]; }
  double hess(int i, int j) const { return hess_[packed(i, j, nvars_)]; }

  Jet& operator+=(const Jet& o) {
    const int nv = merge(o);
    value_ += o.value_;
    for (int i = 0; i < nv; ++i) grad_[i] += o.grad_[i];
    for (int k = 0; k < packed_size(nv); ++k) hess_[k] += o.hess_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    const int nv = merge(o);
    value_ -= o.value_;
    for (int i = 0; i < nv; ++i) grad_[i] -= o.grad_[i];
    for (int k = 0; k < packed_size(nv); ++k) hess_[k] -= o.hess_[k];
    return *this;
  }
  Jet& operator+=(double s) {
    value_ += s;
    return *this;
  }
  Jet& operator-=(double s) {
    value_ -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    value_ *= s;
    for (int i = 0; i < nvars_; ++i) grad_[i] *= s;
    for (int k = 0; k < packed_size(nvars_); ++k) hess_[k] *= s;
    return *this;
  }
  Jet& operator/=(double s) { return *this *= (1.0 / s); }

  Jet& operator*=(const Jet& o) {
    const int nv = merge(o);
    const double a = value_;
    const double b = o.value_;
    int k = 0;
    for (int i = 0; i < nv; ++i) {
      for (int j = i; j < nv; ++j, ++k) {
        hess_[k] = a * o.hess_[k] + b * hess_[k] + grad_[i] * o.grad_[j] +
                   grad_[j] * o.grad_[i];
      }
    }
    for (int i = 0; i < nv; ++i) grad_[i] = a * o.grad_[i] + b * grad_[i];
    value_ = a * b;
    return *this;
  }
  Jet& operator/=(const Jet& o) { return *this *= o.reciprocal(); }

  Jet operator-() const {
    Jet r = *this;
    r *= -1.0;
    return r;
  }

  /// f(this) given f, f', f'' evaluated at value().
  Jet lift(double f0, double f1, double f2) const {
    Jet r(f0, nvars_);
    int k = 0;
    for (int i = 0; i < nvars_; ++i) {
      for (int j = i; j < nvars_; ++j, ++k) {
        r.hess_[k] = f1 * hess_[k] + f2 * grad_[i] * grad_[j];
      }
    }
    for (int i = 0; i < nvars_; ++i) r.grad_[i] = f1 * grad_[i];
    return r;
  }

  Jet reciprocal() const {
    const double inv = 1.0 / value_;
    return lift(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

 private:
  static std::size_t packed(int i, int j, int nv) {
    if (i > j) std::swap(i, j);
    // row i of the packed upper triangle starts after i rows of decreasing length
    return static_cast<std::size_t>(i * nv - i * (i - 1) / 2 + (j - i));
  }
  static int packed_size(int nv) { return nv * (nv + 1) / 2; }

  // A default-constructed jet (nvars 0) adopts the other operand's count; its
  // derivative storage is all zero so the packed layout change is harmless.
  int merge(const Jet& o) {
    assert(nvars_ == 0 || o.nvars_ == 0 || nvars_ == o.nvars_);
    if (o.nvars_ > nvars_) nvars_ = o.nvars_;
    return nvars_;
  }

  double value_ = 0.0;
  int nvars_ = 0;
  std::array<double, kMaxVars> grad_{};
  std::array<double, kPacked> hess_{};
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator+(Jet a, double s) { return a += s; }
inline Jet operator+(double s, Jet a) { return a += s; }
inline Jet operator-(Jet a, double s) { return a -= s; }
inline Jet operator-(double s, const Jet& a) { return (-a) += s; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator/(Jet a, double s) { return a /= s; }
inline Jet operator/(double s, const Jet& a) { return a.reciprocal() * s; }

inline Jet sqrt(const Jet& a) {
  const double r = std::sqrt(a.value());
  return a.lift(r, 0.5 / r, -0.25 / (r * a.value()));
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return a.lift(e, e, e);
}
inline Jet log(const Jet& a) {
  const double x = a.value();
  return a.lift(std::log(x), 1.0 / x, -1.0 / (x * x));
}
inline Jet pow(const Jet& a, double p) {
  const double x = a.value();
  const double f = std::pow(x, p);
  return a.lift(f, p * f / x, p * (p - 1.0) * f / (x * x));
}

}  // namespace eqf
