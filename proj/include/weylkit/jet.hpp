#pragma once

// Truncated multivariate Taylor series ("jets") in the four chart coordinates.
//
// A Jet<Scalar> stores the Taylor coefficients c_alpha = (d^alpha f)(p) / alpha!
// of a smooth function about a base point p, for every multi-index alpha of
// total degree <= order().  Arithmetic is exact up to rounding: products are
// truncated at the smaller of the operand orders, differentiation lowers the
// order by one.  A jet built from a bare scalar is a constant and carries no
// truncation of its own.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace weylkit {

inline constexpr int kChartDim = 4;
inline constexpr int kMaxJetOrder = 10;

using MultiIndex = std::array<int, kChartDim>;

namespace detail {

// Graded monomial layout shared by every jet.  Monomials are sorted by total
// degree, so the coefficients of an order-k jet are a prefix of those of an
// order-(k+1) jet.
struct MonomialTables {
  struct Triple {
    std::uint16_t lhs, rhs, out;
  };

  std::vector<MultiIndex> exponents;
  std::vector<int> degree;
  std::array<int, kMaxJetOrder + 2> count_through{};   // #monomials of degree <= k
  std::vector<Triple> triples;                         // sorted by degree(out)
  std::array<int, kMaxJetOrder + 2> triples_through{}; // #triples with degree(out) <= k
  std::array<std::vector<std::uint16_t>, kChartDim> raise;  // index of alpha + e_v
  std::vector<int> lookup;

  static const MonomialTables& get() {
    static const MonomialTables tables;
    return tables;
  }

  int index_of(const MultiIndex& a) const {
    constexpr int s = kMaxJetOrder + 1;
    return lookup[((a[0] * s + a[1]) * s + a[2]) * s + a[3]];
  }

 private:
  MonomialTables() {
    constexpr int s = kMaxJetOrder + 1;
    lookup.assign(s * s * s * s, -1);
    for (int d = 0; d <= kMaxJetOrder; ++d) {
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b)
          for (int c = d - a - b; c >= 0; --c) {
            MultiIndex e{a, b, c, d - a - b - c};
            lookup[((e[0] * s + e[1]) * s + e[2]) * s + e[3]] = static_cast<int>(exponents.size());
            exponents.push_back(e);
            degree.push_back(d);
          }
      count_through[d] = static_cast<int>(exponents.size());
    }
    count_through[kMaxJetOrder + 1] = count_through[kMaxJetOrder];

    const int n = static_cast<int>(exponents.size());
    for (int out = 0; out < n; ++out) {
      const MultiIndex& e = exponents[out];
      // Enumerate every split e = l + r.
      for (int a = 0; a <= e[0]; ++a)
        for (int b = 0; b <= e[1]; ++b)
          for (int c = 0; c <= e[2]; ++c)
            for (int d = 0; d <= e[3]; ++d) {
              const MultiIndex l{a, b, c, d};
              const MultiIndex r{e[0] - a, e[1] - b, e[2] - c, e[3] - d};
              triples.push_back({static_cast<std::uint16_t>(index_of(l)),
                                 static_cast<std::uint16_t>(index_of(r)),
                                 static_cast<std::uint16_t>(out)});
            }
    }
    // exponents are already graded, so triples are grouped by degree(out)
    int t = 0;
    for (int k = 0; k <= kMaxJetOrder; ++k) {
      while (t < static_cast<int>(triples.size()) && degree[triples[t].out] <= k) ++t;
      triples_through[k] = t;
    }
    triples_through[kMaxJetOrder + 1] = t;

    for (int v = 0; v < kChartDim; ++v) {
      raise[v].resize(count_through[kMaxJetOrder - 1]);
      for (int i = 0; i < count_through[kMaxJetOrder - 1]; ++i) {
        MultiIndex e = exponents[i];
        ++e[v];
        raise[v][i] = static_cast<std::uint16_t>(index_of(e));
      }
    }
  }
};

inline int term_count(int order) {
  return MonomialTables::get().count_through[std::min(order, kMaxJetOrder)];
}

}  // namespace detail

template <typename Scalar>
class Jet {
 public:
  using scalar_type = Scalar;
  static constexpr int kConstantOrder = std::numeric_limits<int>::max();

  Jet() : order_(kConstantOrder), c_(1, Scalar(0)) {}
  Jet(Scalar value) : order_(kConstantOrder), c_(1, value) {}  // NOLINT: implicit by design of the algebra
  template <typename T>
    requires(std::is_arithmetic_v<T> && !std::is_same_v<T, Scalar>)
  Jet(T value) : Jet(static_cast<Scalar>(value)) {}

  static Jet zero(int order) {
    check_order(order);
    Jet j;
    j.order_ = order;
    j.c_.assign(detail::term_count(order), Scalar(0));
    return j;
  }

  static Jet constant(Scalar value, int order) {
    Jet j = zero(order);
    j.c_[0] = value;
    return j;
  }

  // The coordinate function x_var expanded about a point where it equals `value`.
  static Jet variable(Scalar value, int var, int order) {
    Jet j = constant(value, order);
    if (order >= 1) {
      MultiIndex e{0, 0, 0, 0};
      e[var] = 1;
      j.c_[detail::MonomialTables::get().index_of(e)] = Scalar(1);
    }
    return j;
  }

  static Jet from_coefficients(int order, std::vector<Scalar> coeffs) {
    check_order(order);
    if (static_cast<int>(coeffs.size()) != detail::term_count(order))
      throw std::invalid_argument("Jet: coefficient count does not match order");
    Jet j;
    j.order_ = order;
    j.c_ = std::move(coeffs);
    return j;
  }

  int order() const { return order_; }
  bool is_constant() const { return order_ == kConstantOrder; }
  int size() const { return static_cast<int>(c_.size()); }
  Scalar value() const { return c_[0]; }
  const std::vector<Scalar>& coefficients() const { return c_; }

  Scalar coefficient(int flat) const { return flat < size() ? c_[flat] : Scalar(0); }
  Scalar coefficient(const MultiIndex& alpha) const {
    const int deg = alpha[0] + alpha[1] + alpha[2] + alpha[3];
    if (deg > order_ || deg > kMaxJetOrder) return Scalar(0);
    return coefficient(detail::MonomialTables::get().index_of(alpha));
  }

  // d^alpha f at the base point.
  Scalar partial(const MultiIndex& alpha) const {
    const int deg = alpha[0] + alpha[1] + alpha[2] + alpha[3];
    if (!is_constant() && deg > order_)
      throw std::domain_error("Jet::partial: derivative exceeds jet order");
    Scalar fact(1);
    for (int a : alpha)
      for (int k = 2; k <= a; ++k) fact *= Scalar(k);
    return fact * coefficient(alpha);
  }

  Jet derivative(int var) const {
    if (is_constant()) return Jet(Scalar(0));
    if (order_ == 0) throw std::domain_error("Jet::derivative: order-0 jet has no derivative");
    const auto& t = detail::MonomialTables::get();
    Jet r = zero(order_ - 1);
    for (int i = 0; i < r.size(); ++i) {
      const int src = t.raise[var][i];
      r.c_[i] = Scalar(t.exponents[src][var]) * c_[src];
    }
    return r;
  }

  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet r = *this;
    r.order_ = order;
    r.c_.resize(detail::term_count(order));
    return r;
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, Scalar(1)); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, Scalar(-1)); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_constant()) return b.scaled(a.c_[0]);
    if (b.is_constant()) return a.scaled(b.c_[0]);
    const int k = std::min(a.order_, b.order_);
    const auto& t = detail::MonomialTables::get();
    Jet r = zero(k);
    const Scalar* pa = a.c_.data();
    const Scalar* pb = b.c_.data();
    Scalar* pr = r.c_.data();
    const auto* tr = t.triples.data();
    const int n = t.triples_through[k];
    for (int i = 0; i < n; ++i) pr[tr[i].out] += pa[tr[i].lhs] * pb[tr[i].rhs];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.is_constant()) return a.scaled(Scalar(1) / b.c_[0]);
    return a * b.reciprocal();
  }

  Jet reciprocal() const {
    if (c_[0] == Scalar(0)) throw std::domain_error("Jet::reciprocal: zero constant term");
    if (is_constant()) return Jet(Scalar(1) / c_[0]);
    const auto& t = detail::MonomialTables::get();
    Jet r = zero(order_);
    const Scalar inv0 = Scalar(1) / c_[0];
    r.c_[0] = inv0;
    // Degree-by-degree recursion: b * r = 1.
    std::vector<Scalar> acc(r.c_.size(), Scalar(0));
    int next = 1;  // first triple index with degree(out) >= 1
    for (int d = 1; d <= order_; ++d) {
      const int end = t.triples_through[d];
      for (int i = next; i < end; ++i) {
        const auto& tr = t.triples[i];
        if (tr.lhs == 0) continue;
        acc[tr.out] += c_[tr.lhs] * r.c_[tr.rhs];
      }
      for (int o = t.count_through[d - 1]; o < t.count_through[d]; ++o) r.c_[o] = -inv0 * acc[o];
      next = end;
    }
    return r;
  }

  // f(this) for a univariate f given its Taylor coefficients a_n at value().
  Jet compose(const std::vector<Scalar>& a) const {
    if (is_constant()) return Jet(a[0]);
    Jet delta = *this;
    delta.c_[0] = Scalar(0);
    Jet r = constant(a[order_], order_);
    for (int n = order_ - 1; n >= 0; --n) {
      r = r * delta;
      r.c_[0] += a[n];
    }
    return r;
  }

  int taylor_terms() const { return is_constant() ? 1 : order_ + 1; }

 private:
  static void check_order(int order) {
    if (order < 0 || order > kMaxJetOrder)
      throw std::invalid_argument("Jet: order out of supported range");
  }

  Jet scaled(Scalar s) const {
    Jet r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
  }

  static Jet combine(const Jet& a, const Jet& b, Scalar sign) {
    Jet r;
    r.order_ = std::min(a.order_, b.order_);
    r.c_.assign(r.order_ == kConstantOrder ? 1 : detail::term_count(r.order_), Scalar(0));
    const int n = static_cast<int>(r.c_.size());
    for (int i = 0; i < std::min(n, a.size()); ++i) r.c_[i] = a.c_[i];
    for (int i = 0; i < std::min(n, b.size()); ++i) r.c_[i] += sign * b.c_[i];
    return r;
  }

  int order_;
  std::vector<Scalar> c_;
};

// ----------------------------------------------------------------------------
// Elementary functions, by composition with univariate Taylor coefficients.

template <typename Scalar>
Jet<Scalar> pow(const Jet<Scalar>& x, Scalar r) {
  using std::pow;
  const Scalar x0 = x.value();
  if (x0 <= Scalar(0) && !x.is_constant())
    throw std::domain_error("pow(Jet): non-positive base");
  std::vector<Scalar> a(x.taylor_terms());
  a[0] = pow(x0, r);
  for (std::size_t n = 1; n < a.size(); ++n)
    a[n] = a[n - 1] * (r - Scalar(n - 1)) / (Scalar(n) * x0);
  return x.compose(a);
}

template <typename Scalar>
Jet<Scalar> sqrt(const Jet<Scalar>& x) {
  if (x.is_constant()) {
    using std::sqrt;
    return Jet<Scalar>(sqrt(x.value()));
  }
  return pow(x, Scalar(0.5));
}

template <typename Scalar>
Jet<Scalar> cbrt(const Jet<Scalar>& x) {
  if (x.is_constant()) {
    using std::cbrt;
    return Jet<Scalar>(cbrt(x.value()));
  }
  return pow(x, Scalar(1) / Scalar(3));
}

template <typename Scalar>
Jet<Scalar> exp(const Jet<Scalar>& x) {
  using std::exp;
  std::vector<Scalar> a(x.taylor_terms());
  a[0] = exp(x.value());
  for (std::size_t n = 1; n < a.size(); ++n) a[n] = a[n - 1] / Scalar(n);
  return x.compose(a);
}

template <typename Scalar>
Jet<Scalar> log(const Jet<Scalar>& x) {
  using std::log;
  const Scalar x0 = x.value();
  if (x0 <= Scalar(0)) throw std::domain_error("log(Jet): non-positive argument");
  std::vector<Scalar> a(x.taylor_terms());
  a[0] = log(x0);
  Scalar p(1);
  for (std::size_t n = 1; n < a.size(); ++n) {
    p /= x0;
    a[n] = ((n % 2) ? p : -p) / Scalar(n);
  }
  return x.compose(a);
}

template <typename Scalar>
Jet<Scalar> sin(const Jet<Scalar>& x) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(x.value()), c = cos(x.value());
  const Scalar cycle[4] = {s, c, -s, -c};
  std::vector<Scalar> a(x.taylor_terms());
  Scalar fact(1);
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (n > 1) fact *= Scalar(n);
    a[n] = cycle[n % 4] / fact;
  }
  return x.compose(a);
}

template <typename Scalar>
Jet<Scalar> cos(const Jet<Scalar>& x) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(x.value()), c = cos(x.value());
  const Scalar cycle[4] = {c, -s, -c, s};
  std::vector<Scalar> a(x.taylor_terms());
  Scalar fact(1);
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (n > 1) fact *= Scalar(n);
    a[n] = cycle[n % 4] / fact;
  }
  return x.compose(a);
}

// Value accessors that also work on plain scalars, for code templated on the field type.
template <typename Scalar>
Scalar value_of(const Jet<Scalar>& j) {
  return j.value();
}
inline double value_of(double v) { return v; }
inline long double value_of(long double v) { return v; }

using JetD = Jet<double>;

}  // namespace weylkit

namespace Eigen {

template <typename Scalar>
struct NumTraits<weylkit::Jet<Scalar>> : GenericNumTraits<weylkit::Jet<Scalar>> {
  using Real = weylkit::Jet<Scalar>;
  using NonInteger = weylkit::Jet<Scalar>;
  using Nested = weylkit::Jet<Scalar>;
  using Literal = Scalar;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 8,
    MulCost = 64,
  };
  static inline Real epsilon() { return Real(NumTraits<Scalar>::epsilon()); }
  static inline Real dummy_precision() { return Real(NumTraits<Scalar>::dummy_precision()); }
  static inline int digits10() { return NumTraits<Scalar>::digits10(); }
};

template <typename Scalar, typename BinaryOp>
struct ScalarBinaryOpTraits<weylkit::Jet<Scalar>, Scalar, BinaryOp> {
  using ReturnType = weylkit::Jet<Scalar>;
};
template <typename Scalar, typename BinaryOp>
struct ScalarBinaryOpTraits<Scalar, weylkit::Jet<Scalar>, BinaryOp> {
  using ReturnType = weylkit::Jet<Scalar>;
};

}  // namespace Eigen
