#pragma once

#include <array>
#include <cmath>
#include <string>

#include "invivo/errors.hpp"

namespace invivo {

struct Point {
  double x_mm = 0.0;
  double y_mm = 0.0;
  bool operator==(const Point&) const = default;
};

inline double distance_mm(const Point& a, const Point& b) { return std::hypot(a.x_mm - b.x_mm, a.y_mm - b.y_mm); }

/// Antenna placement for one scenario. Coordinates are in the transverse
/// plane with the abdomen at the origin; +x is the front of the body.
/// Index 0 of each MIMO pair is the "+" coordinate of the +/- entry.
struct AntennaLayout {
  int case_id = 0;  ///< 1..8 for the tabulated placements, 0 for custom
  std::array<Point, 2> tx{};
  std::array<Point, 2> rx{};
  Point siso_tx{};
  Point siso_rx{};
  std::string label;

  bool operator==(const AntennaLayout&) const = default;
};

struct PairDistances {
  std::array<std::array<double, 2>, 2> mimo_mm{};  ///< [rx][tx]
  double siso_mm = 0.0;
};

/// Receivers in front of the body at x = `distance_mm`, transmitters inside.
inline AntennaLayout front_layout(double distance_mm, int case_id = 0) {
  return {case_id,
          {Point{0, 14}, Point{0, -14}},
          {Point{distance_mm, 50}, Point{distance_mm, -50}},
          Point{0, 0},
          Point{distance_mm, 0},
          "Front of body"};
}

/// Tabulated placements: cases 1-4 share a 300 mm Tx/Rx separation at the
/// front, right side, left side and back; cases 5-8 move the front
/// receivers in to 200, 130, 100 and 70 mm.
inline AntennaLayout geometry_for_case(int case_id) {
  switch (case_id) {
    case 1: return front_layout(300, 1);
    case 2:
      return {2, {Point{14, 0}, Point{-14, 0}}, {Point{50, 300}, Point{-50, 300}}, Point{0, 0}, Point{0, 300},
              "Right side of body"};
    case 3:
      return {3, {Point{14, 0}, Point{-14, 0}}, {Point{50, -300}, Point{-50, -300}}, Point{0, 0}, Point{0, -300},
              "Left side of body"};
    case 4:
      return {4, {Point{0, 14}, Point{0, -14}}, {Point{-300, 50}, Point{-300, -50}}, Point{0, 0}, Point{-300, 0},
              "Back of body"};
    case 5: return front_layout(200, 5);
    case 6: return front_layout(130, 6);
    case 7: return front_layout(100, 7);
    case 8: return front_layout(70, 8);
    default: throw PreconditionError("unknown case id " + std::to_string(case_id) + " (expected 1-8)");
  }
}

inline PairDistances pairwise_distances(const AntennaLayout& layout) {
  PairDistances d;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t t = 0; t < 2; ++t) d.mimo_mm[r][t] = distance_mm(layout.tx[t], layout.rx[r]);
  d.siso_mm = distance_mm(layout.siso_tx, layout.siso_rx);
  return d;
}

}  // namespace invivo
