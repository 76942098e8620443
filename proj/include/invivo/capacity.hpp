#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "invivo/channel_realization.hpp"
#include "invivo/errors.hpp"
#include "invivo/link_budget.hpp"
#include "invivo/matrix.hpp"

namespace invivo {

/// H = u * diag(sigma) * v with u, v unitary and sigma descending.
/// Note `v` is the right factor itself (rows are the conjugated right
/// singular vectors), not its adjoint.
struct SvdResult {
  Matrix2c u;
  Matrix2c v;
  std::array<double, 2> sigma{};
};

struct CapacityResult {
  std::vector<double> per_subcarrier;  ///< bits per OFDM symbol, one per data subcarrier
  double total_bps_hz = 0.0;
  double total_bps = 0.0;
};

namespace detail {

// Rotate a unit vector so its first non-zero component is real positive.
inline std::array<Complex, 2> canonical_phase(std::array<Complex, 2> x) {
  const Complex lead = std::abs(x[0]) > 0.0 ? x[0] : x[1];
  const double mag = std::abs(lead);
  if (mag == 0.0) return x;
  const Complex rot = std::conj(lead) / mag;
  return {x[0] * rot, x[1] * rot};
}

inline double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

inline void check_capacity_budget(const LinkBudget& budget) {
  budget.validate();
  require(budget.noise_density_w_per_hz > 0.0, "capacity: noise density must be positive");
}

}  // namespace detail

/// Closed-form SVD of a 2x2 complex matrix.
///
/// The right singular vectors come from a single complex Jacobi rotation of
/// the Hermitian Gram matrix H^H H. The first left vector is H v1 / |H v1|;
/// the second is the orthogonal complement of the first, phased so that
/// u2^H H v2 is real non-negative. sigma2 is read off that projection rather
/// than from the small eigenvalue, which keeps near-rank-1 inputs accurate.
///
/// Right singular vectors follow the convention "first non-zero component
/// real positive"; for repeated singular values V is the identity.
inline SvdResult svd2x2(const Matrix2c& h) {
  detail::require(h.all_finite(), "svd2x2: non-finite matrix entry");

  SvdResult out;
  if (h.frobenius_sq() == 0.0) {
    out.u = Matrix2c::identity();
    out.v = Matrix2c::identity();
    return out;
  }

  // Scale to unit Frobenius norm so the Gram matrix cannot over/underflow.
  const double scale = h.frobenius();
  const Matrix2c hs = h * Complex(1.0 / scale);
  const Matrix2c gram = hs.adjoint() * hs;
  const double a = gram(0, 0).real();
  const double c = gram(1, 1).real();
  const Complex b = gram(0, 1);
  const double beta = std::abs(b);

  double cs = 1.0, sn = 0.0, t = 0.0;
  Complex phase = 1.0;  // e^{-i arg b}
  if (beta > 0.0) {
    phase = std::conj(b) / beta;
    const double tau = (c - a) / (2.0 * beta);
    t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
    cs = 1.0 / std::hypot(1.0, t);
    sn = t * cs;
  }
  const double lambda_first = a - t * beta;
  const double lambda_second = c + t * beta;

  std::array<Complex, 2> v_first{cs, -sn * phase};
  std::array<Complex, 2> v_second{sn, cs * phase};
  if (lambda_second > lambda_first) std::swap(v_first, v_second);
  std::array<Complex, 2> v1 = detail::canonical_phase(v_first);
  std::array<Complex, 2> v2 = detail::canonical_phase(v_second);

  auto project = [&](const std::array<Complex, 2>& v) { return hs.apply(v); };

  auto build = [&](const std::array<Complex, 2>& r1, const std::array<Complex, 2>& r2, std::array<Complex, 2>& u1,
                   std::array<Complex, 2>& u2, double& s1, double& s2) {
    const auto hv1 = project(r1);
    s1 = std::hypot(std::abs(hv1[0]), std::abs(hv1[1]));
    if (s1 > 0.0) {
      u1 = {hv1[0] / s1, hv1[1] / s1};
    } else {
      u1 = {1.0, 0.0};
    }
    const std::array<Complex, 2> base{-std::conj(u1[1]), std::conj(u1[0])};
    const auto hv2 = project(r2);
    const Complex z = std::conj(base[0]) * hv2[0] + std::conj(base[1]) * hv2[1];
    s2 = std::abs(z);
    const Complex rot = s2 > 0.0 ? z / s2 : Complex(1.0);
    u2 = {base[0] * rot, base[1] * rot};
  };

  std::array<Complex, 2> u1, u2;
  double s1 = 0.0, s2 = 0.0;
  build(v1, v2, u1, u2, s1, s2);
  if (s2 > s1) {
    // Only reachable through rounding when the singular values coincide.
    std::swap(v1, v2);
    build(v1, v2, u1, u2, s1, s2);
    s2 = std::min(s1, s2);
  }

  out.u = Matrix2c::from(u1[0], u2[0], u1[1], u2[1]);
  out.v = Matrix2c::from(std::conj(v1[0]), std::conj(v1[1]), std::conj(v2[0]), std::conj(v2[1]));
  out.sigma = {s1 * scale, s2 * scale};
  return out;
}

/// Bits per OFDM symbol on one subcarrier with the power split equally
/// over the two eigenchannels: sum_i log2(1 + lambda_i P / (2 N0 BW)).
inline double subcarrier_capacity(const Matrix2c& h, const LinkBudget& budget) {
  detail::check_capacity_budget(budget);
  detail::require(budget.n_streams == 2, "subcarrier_capacity: requires n_streams == 2");
  const double rho = budget.eigen_snr();
  const auto svd = svd2x2(h);
  return detail::log2_1p(rho * svd.sigma[0] * svd.sigma[0]) + detail::log2_1p(rho * svd.sigma[1] * svd.sigma[1]);
}

/// log2 det(I + rho H H^H), evaluated from trace and determinant without any
/// decomposition. Independent check on subcarrier_capacity.
inline double logdet_capacity(const Matrix2c& h, const LinkBudget& budget) {
  detail::check_capacity_budget(budget);
  detail::require(h.all_finite(), "logdet_capacity: non-finite matrix entry");
  const double rho = budget.power_w / (2.0 * budget.noise_power_w());
  const double det = std::norm(h.det());
  return detail::log2_1p(rho * h.frobenius_sq() + rho * rho * det);
}

namespace detail {

inline CapacityResult aggregate(std::vector<double> per_subcarrier, const LinkBudget& budget) {
  CapacityResult r;
  double sum = 0.0;
  for (double c : per_subcarrier) sum += c;
  r.per_subcarrier = std::move(per_subcarrier);
  r.total_bps_hz = sum / (budget.bandwidth_hz * budget.t_sym_s);
  r.total_bps = r.total_bps_hz * budget.bandwidth_hz;
  return r;
}

}  // namespace detail

/// Single-antenna capacity: per subcarrier log2(1 + |h|^2 P / (N0 BW)).
inline CapacityResult siso_capacity(std::span<const Complex> gains, const LinkBudget& budget) {
  detail::check_capacity_budget(budget);
  detail::require(budget.n_streams == 1, "siso_capacity: requires n_streams == 1");
  detail::require(gains.size() == static_cast<std::size_t>(budget.n_data),
                  "siso_capacity: gain count does not match n_data");
  const double snr = budget.power_w / budget.noise_power_w();
  std::vector<double> per;
  per.reserve(gains.size());
  for (const auto& g : gains) {
    detail::require(is_finite(g), "siso_capacity: non-finite gain");
    per.push_back(detail::log2_1p(std::norm(g) * snr));
  }
  return detail::aggregate(std::move(per), budget);
}

/// Aggregate capacity in bits/s/Hz over all data subcarriers.
inline CapacityResult total_capacity(const ChannelRealization& ch, const LinkBudget& budget) {
  detail::check_capacity_budget(budget);
  detail::require(ch.size() == static_cast<std::size_t>(budget.n_data),
                  "total_capacity: subcarrier count does not match n_data");
  detail::require(ch.n_streams == budget.n_streams, "total_capacity: stream count mismatch");
  if (budget.n_streams == 1) {
    const auto gains = ch.siso_gains();
    return siso_capacity(gains, budget);
  }
  std::vector<double> per;
  per.reserve(ch.size());
  for (const auto& h : ch.matrices) per.push_back(subcarrier_capacity(h, budget));
  return detail::aggregate(std::move(per), budget);
}

}  // namespace invivo
