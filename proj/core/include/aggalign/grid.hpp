#pragma once

#include <Eigen/Core>
#include <array>
#include <stdexcept>

namespace aggalign {

/// Uniform node-centered grid, 1D or 2D, equal spacing per axis.
/// Node coordinates are lower[a] + i * spacing exactly.
struct Grid {
  int dimension = 1;
  std::array<double, 2> lower{0.0, 0.0};
  double spacing = 1.0;
  std::array<int, 2> counts{0, 1};  // nodes per axis; counts[1] == 1 in 1D

  static Grid make_1d(double lo, double hi, double h);
  static Grid make_2d(double lo, double hi, double h);  // square box, dx == dy

  Eigen::Index node_count() const {
    return static_cast<Eigen::Index>(counts[0]) * counts[1];
  }
  double coord(int axis, int i) const { return lower[axis] + i * spacing; }
  double upper(int axis) const { return coord(axis, counts[axis] - 1); }
  Eigen::Index flat(int i, int j) const {
    return static_cast<Eigen::Index>(i) * counts[1] + j;
  }
  double cell_volume() const {
    return dimension == 1 ? spacing : spacing * spacing;
  }
  /// Position of flat node index as a d-vector (padded with 0 in 1D).
  Eigen::Vector2d position(Eigen::Index flat_index) const {
    const int i = static_cast<int>(flat_index / counts[1]);
    const int j = static_cast<int>(flat_index % counts[1]);
    return {coord(0, i), dimension == 2 ? coord(1, j) : 0.0};
  }
};

/// Density values on a grid at a point in time.
struct DensityField {
  Grid grid;
  Eigen::VectorXd rho;  // node-indexed, >= 0
  double time = 0.0;

  double mass() const { return grid.cell_volume() * rho.sum(); }
  void validate() const;
};

}  // namespace aggalign
