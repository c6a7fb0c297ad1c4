#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bpb/accretive.hpp"
#include "bpb/grid_function.hpp"

namespace bpb {

/// One-parameter dyadic BMO norm: sup over dyadic intervals of the
/// quadratic mean oscillation; exact enumeration over all scales.
double bmo_norm_1p(const AxisFunction& a);

/// Rectangular lower-bound surrogate for the product BMO norm: sup over
/// dyadic rectangles R of (1/|R|) * sum over dyadic subrectangles R' of the
/// squared L2 mass of the localized double difference of a on R'.
double rect_bmo_norm(const GridFunction& a, const AccretivePair& pair);

/// Nonnegative coefficients indexed by the dyadic intervals of one axis:
/// c[scale][index], scale = 0..depth.
struct CarlesonSequence {
  AxisShape shape;
  std::vector<std::vector<double>> c;

  static CarlesonSequence zero(AxisShape s);
};

/// sup over dyadic intervals J of (1/|J|) * sum over I contained in J of
/// c_I; exact enumeration.
double carleson_constant(const CarlesonSequence& c);

/// Squared L2 masses of the per-interval differences of a symbol; the
/// sequence whose Carleson constant a BMO symbol controls.
CarlesonSequence diff_mass_sequence(const AxisFunction& a, const AxisFunction& b);

/// One-parameter paraproduct: sum over dyadic intervals V of the b_avg
/// average of f on V times b_diff times the V-difference of a.
AxisFunction partial_paraproduct(const AxisFunction& a, const AxisFunction& f,
                                 const AxisFunction& b_avg, const AxisFunction& b_diff);

/// Bi-parameter paraproduct: sum over dyadic rectangles K x V of the
/// pair_avg-average of f on the rectangle times the tensor weight of
/// pair_diff times the localized double difference of a.
GridFunction full_paraproduct(const GridFunction& a, const GridFunction& f,
                              const AccretivePair& pair_avg, const AccretivePair& pair_diff);

/// Mixed paraproduct: adjoint expectation in variable 1 wrapped around an
/// average in variable 2 of f against the double differences of a.
GridFunction mixed_paraproduct(const GridFunction& a, const GridFunction& f,
                               const AccretivePair& pair_avg, const AccretivePair& pair_diff);

// Hermitian adjoints of the three paraproducts with frozen symbol/weights,
// for use with operator_norm_estimate.
AxisFunction partial_paraproduct_herm_adjoint(const AxisFunction& a, const AxisFunction& g,
                                              const AxisFunction& b_avg,
                                              const AxisFunction& b_diff);
GridFunction full_paraproduct_herm_adjoint(const GridFunction& a, const GridFunction& g,
                                           const AccretivePair& pair_avg,
                                           const AccretivePair& pair_diff);
GridFunction mixed_paraproduct_herm_adjoint(const GridFunction& a, const GridFunction& g,
                                            const AccretivePair& pair_avg,
                                            const AccretivePair& pair_diff);

struct NormEstimate {
  double value = 0.0;
  /// Relative change of the estimate over the last two iterations of the
  /// best start.
  double gap = 0.0;
};

using GridMap = std::function<GridFunction(const GridFunction&)>;

/// Empirical operator norm of a linear map via power iteration on the
/// normal map; max over random starts, lower bound by construction.
NormEstimate operator_norm_estimate(const GridMap& apply, const GridMap& apply_adjoint,
                                    AxisShape shape1, AxisShape shape2, int trials, int iters,
                                    std::uint64_t seed);

}  // namespace bpb
