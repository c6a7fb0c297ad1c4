#include "bpb/accretive.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bpb/errors.hpp"

namespace bpb {

double accretivity_constant(const AxisFunction& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int scale = 0; scale <= b.shape.depth; ++scale) {
    std::int64_t nb = b.shape.block(scale);
    std::int64_t nc = b.shape.cubes(scale);
    for (std::int64_t k = 0; k < nc; ++k) {
      Complex avg = b.v.segment(k * nb, nb).mean();
      best = std::min(best, std::abs(avg));
    }
  }
  return best;
}

AxisFunction random_accretive(std::uint64_t seed, int depth, int dim, double c0, double B) {
  if (!(c0 > 0.0 && c0 <= 1.0 && B >= 1.0))
    throw std::invalid_argument("random_accretive: need 0 < c0 <= 1 <= B");
  AxisShape shape{depth, dim};
  if (c0 == 1.0 && B == 1.0) return AxisFunction::constant(shape, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double eps = std::min(B - 1.0, 1.0 - c0);
  constexpr int kLevels = 12;
  constexpr int kTriesPerLevel = 8;
  for (int level = 0; level < kLevels; ++level) {
    for (int attempt = 0; attempt < kTriesPerLevel; ++attempt) {
      AxisFunction b = AxisFunction::zero(shape);
      for (Eigen::Index i = 0; i < b.v.size(); ++i) {
        Complex z(unif(rng), unif(rng));
        double m = std::abs(z);
        if (m > 1.0) z /= m;  // keep the perturbation inside the unit disc
        b.v(i) = 1.0 + eps * z;
      }
      if (b.v.cwiseAbs().maxCoeff() <= B && accretivity_constant(b) >= c0) return b;
    }
    eps *= 0.5;
  }
  throw GenerationFailureError("random_accretive: resampling budget exhausted");
}

AccretivePair random_pair(std::uint64_t seed, int depth1, int depth2, int dim1, int dim2,
                          double c0, double B) {
  std::mt19937_64 rng(seed);
  AccretivePair pair;
  pair.b1 = random_accretive(rng(), depth1, dim1, c0, B);
  pair.b2 = random_accretive(rng(), depth2, dim2, c0, B);
  pair.c0 = c0;
  pair.B = B;
  return pair;
}

AccretivePair unit_pair(int depth1, int depth2, int dim1, int dim2) {
  AccretivePair pair;
  pair.b1 = AxisFunction::constant({depth1, dim1}, 1.0);
  pair.b2 = AxisFunction::constant({depth2, dim2}, 1.0);
  pair.c0 = 1.0;
  pair.B = 1.0;
  return pair;
}

}  // namespace bpb
