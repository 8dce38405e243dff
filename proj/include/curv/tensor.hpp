#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace curv {

constexpr int kDim = 4;  // parameter dimension

// Dense rank-r array over 4 parameter indices with values of type V. All
// indices are stored in lower position; raising happens only at contraction
// time. Index order is row-major: the first index varies slowest.
template <class V>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int rank, const V& fill = V()) : rank_(rank) {
    if (rank < 0 || rank > 5) throw std::invalid_argument("tensor rank out of range");
    data_.assign(std::size_t(1) << (2 * rank), fill);
  }

  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }
  V& at(std::size_t flat) { return data_[flat]; }
  const V& at(std::size_t flat) const { return data_[flat]; }

  V& operator()(int i) { return data_[i]; }
  const V& operator()(int i) const { return data_[i]; }
  V& operator()(int i, int j) { return data_[4 * i + j]; }
  const V& operator()(int i, int j) const { return data_[4 * i + j]; }
  V& operator()(int i, int j, int k) { return data_[16 * i + 4 * j + k]; }
  const V& operator()(int i, int j, int k) const { return data_[16 * i + 4 * j + k]; }
  V& operator()(int i, int j, int k, int l) { return data_[64 * i + 16 * j + 4 * k + l]; }
  const V& operator()(int i, int j, int k, int l) const {
    return data_[64 * i + 16 * j + 4 * k + l];
  }
  V& operator()(int i, int j, int k, int l, int n) {
    return data_[256 * i + 64 * j + 16 * k + 4 * l + n];
  }
  const V& operator()(int i, int j, int k, int l, int n) const {
    return data_[256 * i + 64 * j + 16 * k + 4 * l + n];
  }

  // Decodes a flat index into per-slot indices.
  std::array<int, 5> unflatten(std::size_t flat) const {
    std::array<int, 5> idx{};
    for (int s = rank_ - 1; s >= 0; --s) {
      idx[s] = int(flat & 3u);
      flat >>= 2;
    }
    return idx;
  }
  std::size_t flatten(const std::array<int, 5>& idx) const {
    std::size_t f = 0;
    for (int s = 0; s < rank_; ++s) f = 4 * f + std::size_t(idx[s]);
    return f;
  }

  std::vector<V>& data() { return data_; }
  const std::vector<V>& data() const { return data_; }

 private:
  int rank_ = 0;
  std::vector<V> data_;
};

}  // namespace curv
