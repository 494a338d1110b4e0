#pragma once

// Dense rank-R tensors over the four chart (or frame) indices, templated on
// the component type so the same code runs on doubles and on jets.

#include <array>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace weylkit {

constexpr std::size_t pow4(std::size_t rank) { return rank == 0 ? 1 : 4 * pow4(rank - 1); }

template <typename T, std::size_t Rank>
class Tensor {
 public:
  static constexpr std::size_t kRank = Rank;
  static constexpr std::size_t kSize = pow4(Rank);
  using value_type = T;
  using Index = std::array<int, Rank>;

  Tensor() : data_(kSize) {}
  explicit Tensor(const T& fill) : data_(kSize, fill) {}

  template <typename... I>
    requires(sizeof...(I) == Rank && (std::is_integral_v<I> && ...))
  T& operator()(I... i) {
    return data_[flat(Index{static_cast<int>(i)...})];
  }
  template <typename... I>
    requires(sizeof...(I) == Rank && (std::is_integral_v<I> && ...))
  const T& operator()(I... i) const {
    return data_[flat(Index{static_cast<int>(i)...})];
  }

  T& operator[](const Index& i) { return data_[flat(i)]; }
  const T& operator[](const Index& i) const { return data_[flat(i)]; }
  T& at_flat(std::size_t i) { return data_[i]; }
  const T& at_flat(std::size_t i) const { return data_[i]; }

  static constexpr std::size_t flat(const Index& i) {
    std::size_t f = 0;
    for (std::size_t k = 0; k < Rank; ++k) f = 4 * f + static_cast<std::size_t>(i[k]);
    return f;
  }
  static constexpr Index unflat(std::size_t f) {
    Index i{};
    for (std::size_t k = Rank; k-- > 0;) {
      i[k] = static_cast<int>(f % 4);
      f /= 4;
    }
    return i;
  }

  template <typename F>
  static Tensor generate(F&& fn) {
    Tensor t;
    for (std::size_t f = 0; f < kSize; ++f) t.data_[f] = fn(unflat(f));
    return t;
  }

  template <typename F>
  auto map(F&& fn) const {
    using U = std::decay_t<decltype(fn(data_[0]))>;
    Tensor<U, Rank> t;
    for (std::size_t f = 0; f < kSize; ++f) t.at_flat(f) = fn(data_[f]);
    return t;
  }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t f = 0; f < kSize; ++f) data_[f] += o.data_[f];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t f = 0; f < kSize; ++f) data_[f] -= o.data_[f];
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  template <typename S>
  friend Tensor operator*(const S& s, Tensor a) {
    for (auto& v : a.data_) v = s * v;
    return a;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  std::vector<T> data_;
};

}  // namespace weylkit
