#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "bpb/dyadic.hpp"

namespace bpb {

using Complex = std::complex<double>;

/// Shape of one axis of the bi-parameter mesh: a dyadic mesh of depth N on
/// [0,1)^dim. Cells are linearized so that every dyadic cube of the axis is
/// a contiguous block (Morton order for dim = 2).
struct AxisShape {
  int depth = 0;
  int dim = 1;

  std::int64_t cells() const { return std::int64_t{1} << (dim * depth); }
  double cell_volume() const { return std::ldexp(1.0, -dim * depth); }
  /// Number of finest cells inside one cube at the given scale.
  std::int64_t block(int scale) const { return std::int64_t{1} << (dim * (depth - scale)); }
  /// Number of cubes at the given scale.
  std::int64_t cubes(int scale) const { return std::int64_t{1} << (dim * scale); }
  bool operator==(const AxisShape&) const = default;
};

/// Midpoint coordinate of a finest cell on a dim-1 axis.
double axis_cell_midpoint(const AxisShape& shape, std::int64_t cell);

/// Linear block index (at the axis' cell linearization) of a cube given by
/// per-axis indices; inverse of morton order for dim = 2.
std::int64_t cube_path(const AxisShape& shape, const DyadicCube& c);

/// Piecewise-constant complex function of one variable.
struct AxisFunction {
  AxisShape shape;
  Eigen::VectorXcd v;

  static AxisFunction zero(AxisShape s) {
    return {s, Eigen::VectorXcd::Zero(s.cells())};
  }
  static AxisFunction constant(AxisShape s, Complex c) {
    return {s, Eigen::VectorXcd::Constant(s.cells(), c)};
  }
};

/// Piecewise-constant complex function on the bi-parameter mesh. Rows index
/// axis-1 cells, columns axis-2 cells.
struct GridFunction {
  AxisShape shape1, shape2;
  Eigen::MatrixXcd v;

  static GridFunction zero(AxisShape s1, AxisShape s2) {
    return {s1, s2, Eigen::MatrixXcd::Zero(s1.cells(), s2.cells())};
  }
  static GridFunction constant(AxisShape s1, AxisShape s2, Complex c) {
    return {s1, s2, Eigen::MatrixXcd::Constant(s1.cells(), s2.cells(), c)};
  }
  double cell_volume() const { return shape1.cell_volume() * shape2.cell_volume(); }
  bool same_mesh(const GridFunction& o) const {
    return shape1 == o.shape1 && shape2 == o.shape2;
  }
};

void require_same_mesh(const GridFunction& f, const GridFunction& g, const char* where);

/// Bilinear pairing: integral of f * g (no conjugation).
Complex pair_bilinear(const GridFunction& f, const GridFunction& g);
/// Sesquilinear pairing: integral of f * conj(g).
Complex pair_sesquilinear(const GridFunction& f, const GridFunction& g);
Complex pair_bilinear(const AxisFunction& f, const AxisFunction& g);
Complex pair_sesquilinear(const AxisFunction& f, const AxisFunction& g);

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

Norms norms(const GridFunction& f);
Norms norms(const AxisFunction& f);

GridFunction tensor(const AxisFunction& f1, const AxisFunction& f2);

enum class Axes { First, Second, Both };

/// b-adapted average of f over the dyadic rectangle R = c1 x c2 (standard
/// grid cubes, one per axis). Averaging over both axes yields a scalar.
Complex b_average(const GridFunction& f, const DyadicCube& c1, const DyadicCube& c2,
                  const AxisFunction& b1, const AxisFunction& b2);
/// One-axis b-adapted average over cube c on the chosen axis; the result is
/// a function of the remaining variable.
AxisFunction b_average_axis(const GridFunction& f, const DyadicCube& c,
                            const AxisFunction& b, int axis);

// Serialization. CSV holds finest cells in row-major order with a header
// carrying depths and dims; JSON mirrors the same layout.
std::string to_csv(const GridFunction& f);
GridFunction grid_from_csv(std::istream& in);
std::string to_json(const GridFunction& f);
GridFunction grid_from_json(const std::string& text);
std::string to_csv(const AxisFunction& f);
AxisFunction axis_from_csv(std::istream& in);
std::string to_json(const AxisFunction& f);
AxisFunction axis_from_json(const std::string& text);

}  // namespace bpb
