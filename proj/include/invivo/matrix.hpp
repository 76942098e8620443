#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace invivo {

using Complex = std::complex<double>;

inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// 2x2 complex matrix, row = receive antenna, column = transmit antenna.
struct Matrix2c {
  std::array<Complex, 4> m{};

  constexpr Complex& operator()(int row, int col) { return m[static_cast<std::size_t>(2 * row + col)]; }
  constexpr const Complex& operator()(int row, int col) const {
    return m[static_cast<std::size_t>(2 * row + col)];
  }

  static constexpr Matrix2c from(Complex a, Complex b, Complex c, Complex d) { return {{a, b, c, d}}; }
  static constexpr Matrix2c identity() { return from(1.0, 0.0, 0.0, 1.0); }
  static constexpr Matrix2c zero() { return {}; }
  static constexpr Matrix2c diag(Complex a, Complex b) { return from(a, 0.0, 0.0, b); }

  bool all_finite() const {
    for (const auto& z : m)
      if (!is_finite(z)) return false;
    return true;
  }

  Matrix2c adjoint() const { return from(std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])); }

  Complex det() const { return m[0] * m[3] - m[1] * m[2]; }

  double frobenius_sq() const { return std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3]); }
  double frobenius() const { return std::sqrt(frobenius_sq()); }

  Matrix2c operator*(const Matrix2c& o) const {
    Matrix2c r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j);
    return r;
  }
  Matrix2c operator+(const Matrix2c& o) const {
    Matrix2c r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Matrix2c operator-(const Matrix2c& o) const {
    Matrix2c r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Matrix2c operator*(Complex s) const {
    Matrix2c r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = m[i] * s;
    return r;
  }

  std::array<Complex, 2> apply(const std::array<Complex, 2>& x) const {
    return {m[0] * x[0] + m[1] * x[1], m[2] * x[0] + m[3] * x[1]};
  }

  bool operator==(const Matrix2c&) const = default;
};

}  // namespace invivo
