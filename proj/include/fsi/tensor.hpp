// SPDX-License-Identifier: Apache-2.0
//
// Small fixed-size 2D tensor helpers shared by the constitutive laws and
// the element kernels. Templated on the scalar type so they work with
// plain doubles and with dual numbers.

#pragma once

#include <array>

namespace fsi {

template <typename T>
struct Vec2 {
  T x{}, y{};
  T& operator[](int i) { return i == 0 ? x : y; }
  const T& operator[](int i) const { return i == 0 ? x : y; }
};

template <typename T>
inline Vec2<T> operator+(const Vec2<T>& a, const Vec2<T>& b) { return {a.x + b.x, a.y + b.y}; }
template <typename T>
inline Vec2<T> operator-(const Vec2<T>& a, const Vec2<T>& b) { return {a.x - b.x, a.y - b.y}; }
template <typename T, typename S>
inline Vec2<T> operator*(const S& s, const Vec2<T>& a) { return {s * a.x, s * a.y}; }
template <typename T>
inline T dot(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.x + a.y * b.y; }

// Row-major 2x2 tensor.
template <typename T>
struct Mat2 {
  std::array<T, 4> a{};  // [a00, a01, a10, a11]

  T& operator()(int i, int j) { return a[2 * i + j]; }
  const T& operator()(int i, int j) const { return a[2 * i + j]; }

  static Mat2 identity() {
    Mat2 m;
    m.a = {T(1.0), T(0.0), T(0.0), T(1.0)};
    return m;
  }
};

template <typename T>
inline Mat2<T> operator+(const Mat2<T>& x, const Mat2<T>& y) {
  Mat2<T> r;
  for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

template <typename T>
inline Mat2<T> operator-(const Mat2<T>& x, const Mat2<T>& y) {
  Mat2<T> r;
  for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

template <typename T, typename S>
inline Mat2<T> operator*(const S& s, const Mat2<T>& x) {
  Mat2<T> r;
  for (int i = 0; i < 4; ++i) r.a[i] = s * x.a[i];
  return r;
}

template <typename T>
inline Mat2<T> matmul(const Mat2<T>& x, const Mat2<T>& y) {
  Mat2<T> r;
  r(0, 0) = x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0);
  r(0, 1) = x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1);
  r(1, 0) = x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0);
  r(1, 1) = x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1);
  return r;
}

template <typename T>
inline Mat2<T> transpose(const Mat2<T>& x) {
  Mat2<T> r;
  r(0, 0) = x(0, 0);
  r(0, 1) = x(1, 0);
  r(1, 0) = x(0, 1);
  r(1, 1) = x(1, 1);
  return r;
}

template <typename T>
inline T det(const Mat2<T>& x) { return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0); }

template <typename T>
inline T trace(const Mat2<T>& x) { return x(0, 0) + x(1, 1); }

template <typename T>
inline Mat2<T> inverse(const Mat2<T>& x, const T& determinant) {
  Mat2<T> r;
  const T inv = T(1.0) / determinant;
  r(0, 0) = x(1, 1) * inv;
  r(0, 1) = T(0.0) - x(0, 1) * inv;
  r(1, 0) = T(0.0) - x(1, 0) * inv;
  r(1, 1) = x(0, 0) * inv;
  return r;
}

template <typename T>
inline Mat2<T> inverse(const Mat2<T>& x) { return inverse(x, det(x)); }

// y = M v
template <typename T>
inline Vec2<T> matvec(const Mat2<T>& m, const Vec2<T>& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y, m(1, 0) * v.x + m(1, 1) * v.y};
}

// y = M^T v
template <typename T>
inline Vec2<T> matvec_t(const Mat2<T>& m, const Vec2<T>& v) {
  return {m(0, 0) * v.x + m(1, 0) * v.y, m(0, 1) * v.x + m(1, 1) * v.y};
}

template <typename T>
inline T ddot(const Mat2<T>& x, const Mat2<T>& y) {
  return x.a[0] * y.a[0] + x.a[1] * y.a[1] + x.a[2] * y.a[2] + x.a[3] * y.a[3];
}

template <typename T>
inline Mat2<T> outer(const Vec2<T>& u, const Vec2<T>& v) {
  Mat2<T> r;
  r(0, 0) = u.x * v.x;
  r(0, 1) = u.x * v.y;
  r(1, 0) = u.y * v.x;
  r(1, 1) = u.y * v.y;
  return r;
}

}  // namespace fsi
