#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace fkgeo {

// Small dense row-major tensor container for pointwise curvature data
// (Christoffel symbols, Riemann components, their covariant derivatives).
template <typename T, int Rank>
class MultiArray {
 public:
  MultiArray() : dims_{}, strides_{} {}

  explicit MultiArray(const std::array<int, Rank>& dims) { reshape(dims); }

  void reshape(const std::array<int, Rank>& dims) {
    dims_ = dims;
    std::size_t total = 1;
    for (int r = Rank - 1; r >= 0; --r) {
      strides_[static_cast<std::size_t>(r)] = total;
      total *= static_cast<std::size_t>(dims[static_cast<std::size_t>(r)]);
    }
    data_.assign(total, T{});
  }

  int dim(int r) const { return dims_[static_cast<std::size_t>(r)]; }
  std::size_t size() const { return data_.size(); }

  template <typename... Ix>
  T& operator()(Ix... ix) {
    static_assert(sizeof...(Ix) == Rank);
    return data_[offset({static_cast<int>(ix)...})];
  }
  template <typename... Ix>
  const T& operator()(Ix... ix) const {
    static_assert(sizeof...(Ix) == Rank);
    return data_[offset({static_cast<int>(ix)...})];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::size_t offset(const std::array<int, Rank>& ix) const {
    std::size_t o = 0;
    for (std::size_t r = 0; r < Rank; ++r) {
      assert(ix[r] >= 0 && ix[r] < dims_[r]);
      o += strides_[r] * static_cast<std::size_t>(ix[r]);
    }
    return o;
  }

  std::array<int, Rank> dims_;
  std::array<std::size_t, Rank> strides_;
  std::vector<T> data_;
};

template <typename T>
using Array3 = MultiArray<T, 3>;
template <typename T>
using Array4 = MultiArray<T, 4>;
template <typename T>
using Array5 = MultiArray<T, 5>;

}  // namespace fkgeo
