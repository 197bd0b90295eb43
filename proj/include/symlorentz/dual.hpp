#pragma once

// Forward-mode dual numbers carrying a value and its three spatial partials.
//
// Dual<double> gives first derivatives. Nesting, Dual<Dual<double>>, gives
// second derivatives: seed the outer and inner gradients with the same unit
// vectors (see seed_second_order) and read the Hessian from grad[j].grad[l].

#include <array>
#include <cmath>
#include <cstddef>

#include "symlorentz/vec.hpp"

namespace symlorentz {

template <class T>
struct Dual {
  T val{};
  std::array<T, 3> grad{};

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v) {}  // NOLINT: constants promote implicitly
  constexpr Dual(T v, std::array<T, 3> g) : val(v), grad(g) {}
};

using Dual3 = Dual<double>;
using Dual3x2 = Dual<Dual<double>>;

inline constexpr double value_of(double x) { return x; }
template <class T>
constexpr double value_of(const Dual<T>& x) {
  return value_of(x.val);
}

namespace detail {
template <class T, class F>
constexpr Dual<T> map_grad(const Dual<T>& a, F&& f) {
  Dual<T> r;
  for (std::size_t i = 0; i < 3; ++i) r.grad[i] = f(a.grad[i]);
  return r;
}

// f(a) given f(a.val) and f'(a.val).
template <class T>
constexpr Dual<T> chain(const Dual<T>& a, const T& f, const T& df) {
  Dual<T> r;
  r.val = f;
  for (std::size_t i = 0; i < 3; ++i) r.grad[i] = df * a.grad[i];
  return r;
}
}  // namespace detail

template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r = detail::map_grad(a, [](const T& g) { return -g; });
  r.val = -a.val;
  return r;
}

template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.val = a.val + b.val;
  for (std::size_t i = 0; i < 3; ++i) r.grad[i] = a.grad[i] + b.grad[i];
  return r;
}

template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.val = a.val - b.val;
  for (std::size_t i = 0; i < 3; ++i) r.grad[i] = a.grad[i] - b.grad[i];
  return r;
}

template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.val = a.val * b.val;
  for (std::size_t i = 0; i < 3; ++i) r.grad[i] = a.grad[i] * b.val + a.val * b.grad[i];
  return r;
}

template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.val = a.val / b.val;
  const T inv_b2 = T(1.0) / (b.val * b.val);
  for (std::size_t i = 0; i < 3; ++i) r.grad[i] = (a.grad[i] * b.val - a.val * b.grad[i]) * inv_b2;
  return r;
}

template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, double b) {
  Dual<T> r = a;
  r.val = a.val + b;
  return r;
}
template <class T>
constexpr Dual<T> operator+(double a, const Dual<T>& b) {
  return b + a;
}
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, double b) {
  Dual<T> r = a;
  r.val = a.val - b;
  return r;
}
template <class T>
constexpr Dual<T> operator-(double a, const Dual<T>& b) {
  return -b + a;
}
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, double b) {
  Dual<T> r = detail::map_grad(a, [b](const T& g) { return g * b; });
  r.val = a.val * b;
  return r;
}
template <class T>
constexpr Dual<T> operator*(double a, const Dual<T>& b) {
  return b * a;
}
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, double b) {
  return a * (1.0 / b);
}
template <class T>
constexpr Dual<T> operator/(double a, const Dual<T>& b) {
  return Dual<T>(a) / b;
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, T(sin(a.val)), T(cos(a.val)));
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, T(cos(a.val)), T(-sin(a.val)));
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
  using std::tan;
  const T t = tan(a.val);
  return detail::chain(a, t, T(1.0 + t * t));
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.val);
  return detail::chain(a, e, e);
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return detail::chain(a, T(log(a.val)), T(1.0 / a.val));
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.val);
  return detail::chain(a, s, T(0.5 / s));
}
template <class T>
Dual<T> atan(const Dual<T>& a) {
  using std::atan;
  return detail::chain(a, T(atan(a.val)), T(1.0 / (1.0 + a.val * a.val)));
}
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  return detail::chain(a, T(pow(a.val, p)), T(p * pow(a.val, p - 1.0)));
}

/// Two-argument angle in (-pi, pi] with gradient (x dy - y dx) / (x^2 + y^2).
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  Dual<T> r;
  r.val = atan2(y.val, x.val);
  const T inv_r2 = T(1.0) / (x.val * x.val + y.val * y.val);
  for (std::size_t i = 0; i < 3; ++i) r.grad[i] = (x.val * y.grad[i] - y.val * x.grad[i]) * inv_r2;
  return r;
}

/// Seeds a point for first derivatives with respect to x, y, z.
inline Vec3<Dual3> seed_first_order(const Vec3d& x) {
  Vec3<Dual3> r;
  for (std::size_t i = 0; i < 3; ++i) {
    r[i].val = x[i];
    r[i].grad[i] = 1.0;
  }
  return r;
}

/// Seeds a point for second derivatives with respect to x, y, z.
inline Vec3<Dual3x2> seed_second_order(const Vec3d& x) {
  Vec3<Dual3x2> r;
  for (std::size_t i = 0; i < 3; ++i) {
    r[i].val.val = x[i];
    r[i].val.grad[i] = 1.0;
    r[i].grad[i].val = 1.0;
  }
  return r;
}

}  // namespace symlorentz
