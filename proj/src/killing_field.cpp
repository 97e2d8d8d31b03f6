#include "eqf/killing_field.hpp"

#include <vector>

#include "eqf/errors.hpp"

namespace eqf {

KillingField sym_product(const SkewMatrix& k, const SkewMatrix& l) {
  if (k.n() != l.n()) throw DimensionError("skew matrices have different sizes");
  const int m = k.n() + 1;
  const Mat& K = k.matrix();
  const Mat& L = l.matrix();
  std::vector<double> raw(static_cast<std::size_t>(m) * m * m * m);
  std::size_t idx = 0;
  // <K e_i, e_j> = K(j, i)
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          raw[idx++] = K(j, i) * L(b, a) + L(j, i) * K(b, a);
        }
      }
    }
  }
  // raw already has the pair symmetries; the projection only strips its
  // totally antisymmetric part, which vanishes on (p, v, p, w).
  return KillingField(project_algebraic(k.n(), raw));
}

}  // namespace eqf
