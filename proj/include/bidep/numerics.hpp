// Dense real vectors/matrices (row-major, 64-bit) and the activation
// functions used by the parser.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidep {

using Real = double;

class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

struct RealVector {
  std::vector<Real> data;

  RealVector() = default;
  explicit RealVector(std::size_t n, Real fill = 0.0) : data(n, fill) {}
  RealVector(std::initializer_list<Real> init) : data(init) {}

  std::size_t dim() const { return data.size(); }
  Real& operator[](std::size_t i) { return data[i]; }
  Real operator[](std::size_t i) const { return data[i]; }
  bool empty() const { return data.empty(); }

  void fill(Real v) { data.assign(data.size(), v); }
};

struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Real> data;  // row-major

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c, Real fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  Real& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  Real at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }

  RealVector column(std::size_t c) const {
    RealVector out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
    return out;
  }
};

// out_i = x_i for x_i >= 0, else 0.1 * x_i.
RealVector lrel(const RealVector& x);

// Derivative of lrel, elementwise (1 or 0.1; slope 1 at exactly 0).
Real lrel_slope(Real x);

RealVector sigmoid_vec(const RealVector& x);
RealVector tanh_vec(const RealVector& x);

// Max-subtracted softmax. Throws DimensionError on an empty vector.
RealVector softmax(const RealVector& s);

// y = M x. Throws DimensionError naming both shapes on mismatch.
RealVector matvec(const RealMatrix& m, const RealVector& x);

Real dot(const RealVector& a, const RealVector& b);

bool all_finite(const RealVector& v);
bool all_finite(const RealMatrix& m);

std::string shape_str(const RealMatrix& m);
std::string shape_str(const RealVector& v);

}  // namespace bidep
