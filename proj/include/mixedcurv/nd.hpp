#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mixedcurv/errors.hpp"

namespace mixedcurv {

// Dense multi-index array over a small frame/coordinate dimension (n <= 16).
// Row-major; rank up to 6.
class Nd {
 public:
  Nd() = default;
  explicit Nd(std::initializer_list<int> dims) { reshape(std::vector<int>(dims)); }
  explicit Nd(const std::vector<int>& dims) { reshape(dims); }

  void reshape(const std::vector<int>& dims) {
    dims_.assign(dims.begin(), dims.end());
    std::size_t total = 1;
    for (int d : dims_) total *= static_cast<std::size_t>(d);
    data_.assign(total, 0.0);
  }

  int rank() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  double& at(int i) { return data_[idx1(i)]; }
  double at(int i) const { return data_[idx1(i)]; }
  double& at(int i, int j) { return data_[idx2(i, j)]; }
  double at(int i, int j) const { return data_[idx2(i, j)]; }
  double& at(int i, int j, int k) { return data_[idx3(i, j, k)]; }
  double at(int i, int j, int k) const { return data_[idx3(i, j, k)]; }
  double& at(int i, int j, int k, int l) { return data_[idx4(i, j, k, l)]; }
  double at(int i, int j, int k, int l) const { return data_[idx4(i, j, k, l)]; }

  void fill(double v) { data_.assign(data_.size(), v); }

  Nd& operator+=(const Nd& o) {
    if (o.size() != size()) throw ShapeError("Nd += size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Nd& operator-=(const Nd& o) {
    if (o.size() != size()) throw ShapeError("Nd -= size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Nd& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

 private:
  std::size_t idx1(int i) const { return static_cast<std::size_t>(i); }
  std::size_t idx2(int i, int j) const {
    return static_cast<std::size_t>(i) * dims_[1] + static_cast<std::size_t>(j);
  }
  std::size_t idx3(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + static_cast<std::size_t>(k);
  }
  std::size_t idx4(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k) * dims_[3] +
           static_cast<std::size_t>(l);
  }

  std::vector<int> dims_;
  std::vector<double> data_;
};

}  // namespace mixedcurv
