#pragma once

// Small fixed-size vectors and matrices, generic over the scalar so the same
// field code runs on doubles and on dual numbers.

#include <array>
#include <cmath>
#include <cstddef>

namespace symlorentz {

template <class T>
struct Vec3 {
  std::array<T, 3> c{};

  constexpr T& operator[](std::size_t i) { return c[i]; }
  constexpr const T& operator[](std::size_t i) const { return c[i]; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

using Vec3d = Vec3<double>;

template <class T>
struct Mat3 {
  std::array<std::array<T, 3>, 3> m{};

  constexpr T& operator()(std::size_t i, std::size_t j) { return m[i][j]; }
  constexpr const T& operator()(std::size_t i, std::size_t j) const { return m[i][j]; }
  friend bool operator==(const Mat3&, const Mat3&) = default;

  static constexpr Mat3 identity() {
    Mat3 r{};
    for (std::size_t i = 0; i < 3; ++i) r.m[i][i] = T(1);
    return r;
  }
};

using Mat3d = Mat3<double>;

template <class T>
constexpr Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <class T>
constexpr Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class T>
constexpr Vec3<T> operator-(const Vec3<T>& a) {
  return {-a[0], -a[1], -a[2]};
}
template <class T>
constexpr Vec3<T> operator*(double s, const Vec3<T>& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
template <class T>
constexpr Vec3<T> operator*(const Vec3<T>& a, double s) {
  return s * a;
}
template <class T>
constexpr Vec3<T>& operator+=(Vec3<T>& a, const Vec3<T>& b) {
  a = a + b;
  return a;
}

template <class T>
constexpr T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T>
constexpr Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3d& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const Vec3d& a) {
  return std::fmax(std::fabs(a[0]), std::fmax(std::fabs(a[1]), std::fabs(a[2])));
}

/// Matrix of doubles acting on a vector of any scalar type.
template <class T>
constexpr Vec3<T> operator*(const Mat3d& m, const Vec3<T>& x) {
  Vec3<T> r;
  for (std::size_t i = 0; i < 3; ++i) r[i] = m(i, 0) * x[0] + m(i, 1) * x[1] + m(i, 2) * x[2];
  return r;
}

inline Mat3d operator*(const Mat3d& a, const Mat3d& b) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) r(i, j) += a(i, k) * b(k, j);
  return r;
}

inline Mat3d operator-(const Mat3d& a, const Mat3d& b) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

inline Mat3d operator+(const Mat3d& a, const Mat3d& b) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

inline Mat3d operator*(double s, const Mat3d& a) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = s * a(i, j);
  return r;
}

inline Mat3d transpose(const Mat3d& a) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

inline double determinant(const Mat3d& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

inline double max_abs(const Mat3d& a) {
  double r = 0.0;
  for (const auto& row : a.m)
    for (double v : row) r = std::fmax(r, std::fabs(v));
  return r;
}

}  // namespace symlorentz
