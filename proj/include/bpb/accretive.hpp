#pragma once

#include <cstdint>

#include "bpb/grid_function.hpp"

namespace bpb {

/// A certified tensor weight b = b1 (x) b2: every dyadic average of each
/// factor has modulus >= c0, and each factor is bounded by B pointwise.
struct AccretivePair {
  AxisFunction b1, b2;
  double c0 = 0.0;
  double B = 0.0;
};

/// Minimum over all dyadic cubes (every scale 0..depth) of the modulus of
/// the average of b; exact enumeration. Zero means some average vanishes.
double accretivity_constant(const AxisFunction& b);

/// Random weight of the form 1 + eps * noise, with eps shrunk and the draw
/// repeated until the certificate accretivity_constant >= c0, |b| <= B
/// holds. Throws GenerationFailureError when the resampling budget runs out.
AxisFunction random_accretive(std::uint64_t seed, int depth, int dim, double c0, double B);

/// Two independent certified factors drawn from one seed.
AccretivePair random_pair(std::uint64_t seed, int depth1, int depth2, int dim1, int dim2,
                          double c0, double B);

/// The constant-one pair (certified with c0 = B = 1).
AccretivePair unit_pair(int depth1, int depth2, int dim1, int dim2);

}  // namespace bpb
