#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <string>

#include "latflow/scalar.hpp"

namespace latflow {

template <class T>
using Vec3 = std::array<T, 3>;

/// Row-major 3x3 matrix. Lattice bases store basis vectors as columns.
template <class T>
struct Mat3 {
  std::array<T, 9> m{};

  T& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }
  const T& operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }

  Vec3<T> column(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }
  void set_column(int c, const Vec3<T>& v) {
    for (int r = 0; r < 3; ++r) (*this)(r, c) = v[static_cast<std::size_t>(r)];
  }

  static Mat3 identity() {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out(r, c) = T(r == c ? 1 : 0);
    return out;
  }

  static Mat3 diagonal(const T& d0, const T& d1, const T& d2) {
    Mat3 out;
    for (auto& x : out.m) x = T(0);
    out(0, 0) = d0;
    out(1, 1) = d1;
    out(2, 2) = d2;
    return out;
  }

  friend bool operator==(const Mat3&, const Mat3&) = default;
};

using Matrix3 = Mat3<Scalar>;
using Matrix3d = Mat3<double>;
using IntMatrix3 = Mat3<std::int64_t>;
using Vec3d = Vec3<double>;

template <class T>
Mat3<T> mat_mul(const Mat3<T>& a, const Mat3<T>& b) {
  Mat3<T> out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      T acc = a(r, 0) * b(0, c);
      acc = acc + a(r, 1) * b(1, c);
      acc = acc + a(r, 2) * b(2, c);
      out(r, c) = acc;
    }
  }
  return out;
}

template <class T>
Vec3<T> mat_vec(const Mat3<T>& a, const Vec3<T>& v) {
  Vec3<T> out;
  for (int r = 0; r < 3; ++r) {
    T acc = a(r, 0) * v[0];
    acc = acc + a(r, 1) * v[1];
    acc = acc + a(r, 2) * v[2];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

template <class T>
T determinant(const Mat3<T>& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Matrix of Scalars with every entry converted to `mode`.
Matrix3 convert(const Matrix3& a, const ModeSpec& mode);
Matrix3d to_double(const Matrix3& a);
Matrix3 to_scalar(const Matrix3d& a);

/// An integer vector (p1, p2, q) in Z^3.
struct IntegerVec3 {
  mpz_class p1;
  mpz_class p2;
  mpz_class q;

  bool is_zero() const { return p1 == 0 && p2 == 0 && q == 0; }
  IntegerVec3 operator-() const { return {-p1, -p2, -q}; }
  Vec3<Scalar> to_scalars() const { return {Scalar(p1), Scalar(p2), Scalar(q)}; }
  std::string to_string() const;

  friend bool operator==(const IntegerVec3&, const IntegerVec3&) = default;
};

/// Integer vector from machine integers; throws InvalidInput when a 64-bit
/// coordinate would overflow.
IntegerVec3 make_ivec(std::int64_t p1, std::int64_t p2, std::int64_t q);
std::int64_t to_int64(const mpz_class& z);

}  // namespace latflow
