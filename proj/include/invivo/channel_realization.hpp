#pragma once

#include <string>
#include <vector>

#include "invivo/errors.hpp"
#include "invivo/matrix.hpp"

namespace invivo {

/// Per-subcarrier channel for one Tx/Rx placement. SISO realizations keep
/// their scalar gain in entry (0,0); the other entries are zero.
struct ChannelRealization {
  std::vector<Matrix2c> matrices;
  int n_streams = 2;
  std::string source;

  std::size_t size() const { return matrices.size(); }

  std::vector<Complex> siso_gains() const {
    std::vector<Complex> out;
    out.reserve(matrices.size());
    for (const auto& h : matrices) out.push_back(h(0, 0));
    return out;
  }

  void validate() const {
    detail::require(n_streams == 1 || n_streams == 2, "channel: n_streams must be 1 or 2");
    for (const auto& h : matrices) detail::require(h.all_finite(), "channel: non-finite entry");
  }

  static ChannelRealization uniform(const Matrix2c& h, int n_data, int n_streams) {
    ChannelRealization ch;
    ch.n_streams = n_streams;
    Matrix2c m = h;
    if (n_streams == 1) m = Matrix2c::diag(h(0, 0), 0.0);
    ch.matrices.assign(static_cast<std::size_t>(n_data), m);
    ch.source = "uniform";
    return ch;
  }
};

}  // namespace invivo
