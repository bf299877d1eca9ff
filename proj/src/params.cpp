#include "bidep/params.hpp"

#include <algorithm>
#include <stdexcept>

namespace bidep {

RealMatrix& ParameterSet::add_matrix(const std::string& name, std::size_t rows,
                                     std::size_t cols) {
  if (index_.count(name) != 0) {
    throw std::logic_error("duplicate parameter name: " + name);
  }
  index_[name] = tensors_.size();
  NamedTensor t;
  t.name = name;
  t.is_matrix = true;
  t.mat = RealMatrix(rows, cols);
  tensors_.push_back(std::move(t));
  return tensors_.back().mat;
}

RealVector& ParameterSet::add_vector(const std::string& name, std::size_t dim,
                                     bool is_bias) {
  if (index_.count(name) != 0) {
    throw std::logic_error("duplicate parameter name: " + name);
  }
  index_[name] = tensors_.size();
  NamedTensor t;
  t.name = name;
  t.is_matrix = false;
  t.is_bias = is_bias;
  t.vec = RealVector(dim);
  tensors_.push_back(std::move(t));
  return tensors_.back().vec;
}

NamedTensor& ParameterSet::tensor(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("unknown parameter: " + name);
  }
  return tensors_[it->second];
}

const NamedTensor& ParameterSet::tensor(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("unknown parameter: " + name);
  }
  return tensors_[it->second];
}

std::size_t ParameterSet::total_size() const {
  std::size_t total = 0;
  for (const NamedTensor& t : tensors_) total += t.size();
  return total;
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  for (const NamedTensor& t : tensors_) {
    if (t.is_matrix) {
      out.add_matrix(t.name, t.mat.rows, t.mat.cols);
    } else {
      out.add_vector(t.name, t.vec.dim(), t.is_bias);
    }
  }
  return out;
}

void ParameterSet::zero_all() {
  for (NamedTensor& t : tensors_) {
    std::fill(t.flat(), t.flat() + t.size(), Real{0});
  }
}

}  // namespace bidep
