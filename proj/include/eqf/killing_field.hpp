#pragma once

#include <functional>
#include <utility>

#include "eqf/tensor_core.hpp"

namespace eqf {

/// Symmetric two-tensor field on S^n given by an ambient evaluator.
///
/// `ambient(p)` returns an (n+1)x(n+1) symmetric matrix A with
/// k_p(v, w) = v^T A w for v, w tangent at p. Only the restriction to the
/// tangent space is meaningful.
class SymmetricTensorField {
 public:
  using Evaluator = std::function<Mat(const Vec&)>;

  SymmetricTensorField(int n, Evaluator ambient) : n_(n), ambient_(std::move(ambient)) {}

  int n() const { return n_; }
  Mat ambient(const Vec& p) const { return ambient_(p); }
  double operator()(const Vec& p, const Vec& v, const Vec& w) const {
    return v.dot(ambient_(p) * w);
  }

 private:
  int n_;
  Evaluator ambient_;
};

/// Killing symmetric two-tensor k_p(v, w) = R(p, v, p, w) of the round sphere,
/// represented by its generating curvature tensor.
class KillingField {
 public:
  explicit KillingField(CurvatureTensor generator) : generator_(std::move(generator)) {}

  int n() const { return generator_.n(); }
  const CurvatureTensor& generator() const { return generator_; }

  Mat ambient(const Vec& p) const { return generator_.sandwich(p); }
  double operator()(const Vec& p, const Vec& v, const Vec& w) const {
    return generator_.evaluate(p, v, p, w);
  }

  SymmetricTensorField as_field() const {
    CurvatureTensor r = generator_;
    return SymmetricTensorField(n(), [r](const Vec& p) { return r.sandwich(p); });
  }

 private:
  CurvatureTensor generator_;
};

/// K (.) L : p -> (v, w) -> <Kp, v><Lp, w> + <Lp, v><Kp, w>.
KillingField sym_product(const SkewMatrix& k, const SkewMatrix& l);

}  // namespace eqf
