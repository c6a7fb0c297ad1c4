#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace bpb {

/// A dyadic cube on the unit torus [0,1)^d. The cube is addressed by its
/// scale (0 = the whole torus, each step halves the side) and an integer
/// index per axis. Geometry (the actual offset of the cube) depends on the
/// shifted grid the cube belongs to; see ShiftedGrid.
struct DyadicCube {
  int dim = 1;
  int scale = 0;
  std::array<std::int64_t, 2> index{0, 0};
  std::uint64_t grid_id = 0;

  double side() const;
  bool operator==(const DyadicCube&) const = default;
};

/// A randomly shifted dyadic grid on the torus. For each scale i = 1..depth
/// a binary shift bit per axis; the cube at scale j is offset by the sum of
/// 2^{-i} * bit_i over i > j, reduced mod 1, which keeps the grids nested.
struct ShiftedGrid {
  int depth = 0;
  int dim = 1;
  std::vector<std::array<int, 2>> bits;  // bits[i-1] is the shift at scale i
  std::uint64_t id = 0;

  static ShiftedGrid standard(int depth, int dim);
  static ShiftedGrid from_bits(int dim, std::vector<std::array<int, 2>> bits);

  /// Offset (mod 1, per axis) applied to cubes of the given scale.
  std::array<double, 2> shift_at(int scale) const;

  DyadicCube cube(int scale, std::int64_t i0, std::int64_t i1 = 0) const;
  /// Lower-left corner of the cube on the torus, per axis.
  std::array<double, 2> origin(const DyadicCube& c) const;
  DyadicCube parent(const DyadicCube& c) const;
  DyadicCube ancestor_at_scale(const DyadicCube& c, int scale) const;
  bool contains(const DyadicCube& outer, const DyadicCube& inner) const;
};

/// Uniform i.i.d. shift bits, reproducible from the seed.
ShiftedGrid sample_shift(std::uint64_t seed, int depth, int dim);

/// Goodness parameters: the badness radius exponent gamma is derived from
/// the kernel Holder exponent and the axis dimension.
struct GoodnessParams {
  int r = 2;
  double holder = 1.0;  // delta in (0,1]
  int dim = 1;

  double gamma() const { return holder / (2.0 * dim + 2.0 * holder); }
};

enum class PositionClass { Separated, Inside, Equal, Nearby };

/// Minimal torus distance between two closed dyadic cubes, L-infinity
/// across axes.
double cube_distance(const DyadicCube& a, const DyadicCube& b, const ShiftedGrid& grid);

/// Minimal torus distance from cube I to the boundary faces of cube T.
double distance_to_boundary(const DyadicCube& I, const DyadicCube& T, const ShiftedGrid& grid);

/// Smallest-scale common ancestor of I1 and I2 within the grid.
DyadicCube join(const DyadicCube& I1, const DyadicCube& I2, const ShiftedGrid& grid);

/// True iff no coarser cube in the grid witnesses badness of I. Witness
/// scales run from 1 to scale(I) - r; the scale-0 cell is the whole torus
/// and carries no boundary.
bool is_good(const DyadicCube& I, const ShiftedGrid& grid, const GoodnessParams& p);

/// Position taxonomy of an ordered cube pair with side(I1) <= side(I2).
PositionClass relative_position(const DyadicCube& I1, const DyadicCube& I2,
                                const GoodnessParams& p, const ShiftedGrid& grid);

enum class GoodnessMode { Exhaustive, MonteCarlo };

struct GoodnessEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  bool exact = false;
  std::int64_t samples = 0;
};

/// P(I + omega is good) over random shifts, exhaustively (exact, asserts
/// independence of the base cube) or by Monte Carlo.
GoodnessEstimate goodness_probability(const GoodnessParams& p, int depth, int scale_of_I,
                                      GoodnessMode mode, std::int64_t samples,
                                      std::uint64_t seed);

}  // namespace bpb
