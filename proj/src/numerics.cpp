#include "bidep/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace bidep {

RealVector lrel(const RealVector& x) {
  RealVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const Real v = x[i];
    out[i] = v >= 0.0 ? v : 0.1 * v;
  }
  return out;
}

Real lrel_slope(Real x) { return x >= 0.0 ? 1.0 : 0.1; }

RealVector sigmoid_vec(const RealVector& x) {
  RealVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = 1.0 / (1.0 + std::exp(-x[i]));
  return out;
}

RealVector tanh_vec(const RealVector& x) {
  RealVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

RealVector softmax(const RealVector& s) {
  if (s.empty()) throw DimensionError("softmax: empty input vector");
  const Real mx = *std::max_element(s.data.begin(), s.data.end());
  RealVector out(s.dim());
  Real sum = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    out[i] = std::exp(s[i] - mx);
    sum += out[i];
  }
  for (std::size_t i = 0; i < s.dim(); ++i) out[i] /= sum;
  return out;
}

RealVector matvec(const RealMatrix& m, const RealVector& x) {
  if (m.cols != x.dim()) {
    throw DimensionError("matvec: incompatible shapes " + shape_str(m) + " x " +
                         shape_str(x));
  }
  RealVector out(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const Real* row = m.data.data() + r * m.cols;
    Real acc = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
  return out;
}

Real dot(const RealVector& a, const RealVector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("dot: incompatible shapes " + shape_str(a) + " x " +
                         shape_str(b));
  }
  Real acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

bool all_finite(const RealVector& v) {
  for (Real x : v.data)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const RealMatrix& m) {
  for (Real x : m.data)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string shape_str(const RealMatrix& m) {
  return "[" + std::to_string(m.rows) + "x" + std::to_string(m.cols) + "]";
}

std::string shape_str(const RealVector& v) {
  return "[" + std::to_string(v.dim()) + "]";
}

}  // namespace bidep
