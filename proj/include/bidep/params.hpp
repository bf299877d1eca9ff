// Named learnable tensors. Construction order is fixed, so initialization,
// optimizer state and archive payloads line up deterministically.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "bidep/numerics.hpp"

namespace bidep {

struct NamedTensor {
  std::string name;
  bool is_matrix = true;
  bool is_bias = false;  // bias tensors are zero-initialized
  RealMatrix mat;
  RealVector vec;

  std::size_t size() const { return is_matrix ? mat.size() : vec.dim(); }
  Real* flat() { return is_matrix ? mat.data.data() : vec.data.data(); }
  const Real* flat() const {
    return is_matrix ? mat.data.data() : vec.data.data();
  }
};

class ParameterSet {
 public:
  RealMatrix& add_matrix(const std::string& name, std::size_t rows,
                         std::size_t cols);
  RealVector& add_vector(const std::string& name, std::size_t dim,
                         bool is_bias = false);

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  NamedTensor& tensor(const std::string& name);
  const NamedTensor& tensor(const std::string& name) const;
  RealMatrix& matrix(const std::string& name) { return tensor(name).mat; }
  const RealMatrix& matrix(const std::string& name) const {
    return tensor(name).mat;
  }
  RealVector& vector(const std::string& name) { return tensor(name).vec; }
  const RealVector& vector(const std::string& name) const {
    return tensor(name).vec;
  }

  std::vector<NamedTensor>& tensors() { return tensors_; }
  const std::vector<NamedTensor>& tensors() const { return tensors_; }
  std::size_t total_size() const;

  // Same names and shapes, all entries zero.
  ParameterSet zeros_like() const;
  void zero_all();

 private:
  std::vector<NamedTensor> tensors_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace bidep
