#include "bpb/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bpb {

namespace {

double mod1(double x) {
  double y = std::fmod(x, 1.0);
  return y < 0.0 ? y + 1.0 : y;
}

// Torus distance between closed intervals [a1, a1+l1] and [a2, a2+l2].
double interval_distance(double a1, double l1, double a2, double l2) {
  double gap1 = mod1(a2 - (a1 + l1));  // going up from the end of I1
  double gap2 = mod1(a1 - (a2 + l2));  // going up from the end of I2
  // Disjoint intervals tile the circle together with the two gaps; any
  // other total means they overlap.
  if (std::abs(gap1 + gap2 + l1 + l2 - 1.0) > 1e-12) return 0.0;
  return std::min(gap1, gap2);
}

// Torus distance from the closed interval [a, a+l] to the point c.
double interval_point_distance(double a, double l, double c) {
  double t = mod1(c - a);
  if (t <= l) return 0.0;
  return std::min(t - l, 1.0 - t);
}

std::uint64_t hash_bits(int depth, int dim, const std::vector<std::array<int, 2>>& bits) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(depth));
  mix(static_cast<std::uint64_t>(dim));
  for (const auto& b : bits) {
    mix(static_cast<std::uint64_t>(b[0]) | (static_cast<std::uint64_t>(b[1]) << 1));
  }
  return h;
}

}  // namespace

double DyadicCube::side() const { return std::ldexp(1.0, -scale); }

ShiftedGrid ShiftedGrid::standard(int depth, int dim) {
  return from_bits(dim, std::vector<std::array<int, 2>>(static_cast<std::size_t>(depth), {0, 0}));
}

ShiftedGrid ShiftedGrid::from_bits(int dim, std::vector<std::array<int, 2>> bits) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("ShiftedGrid: dim must be 1 or 2");
  ShiftedGrid g;
  g.depth = static_cast<int>(bits.size());
  g.dim = dim;
  g.bits = std::move(bits);
  g.id = hash_bits(g.depth, g.dim, g.bits);
  return g;
}

std::array<double, 2> ShiftedGrid::shift_at(int scale) const {
  std::array<double, 2> s{0.0, 0.0};
  for (int i = scale + 1; i <= depth; ++i) {
    double w = std::ldexp(1.0, -i);
    s[0] += w * bits[static_cast<std::size_t>(i - 1)][0];
    s[1] += w * bits[static_cast<std::size_t>(i - 1)][1];
  }
  s[0] = mod1(s[0]);
  s[1] = mod1(s[1]);
  return s;
}

DyadicCube ShiftedGrid::cube(int scale, std::int64_t i0, std::int64_t i1) const {
  if (scale < 0 || scale > depth) throw std::invalid_argument("cube: scale out of range");
  std::int64_t n = std::int64_t{1} << scale;
  if (i0 < 0 || i0 >= n || (dim == 2 && (i1 < 0 || i1 >= n)))
    throw std::invalid_argument("cube: index out of range");
  return DyadicCube{dim, scale, {i0, dim == 2 ? i1 : 0}, id};
}

std::array<double, 2> ShiftedGrid::origin(const DyadicCube& c) const {
  auto s = shift_at(c.scale);
  double l = c.side();
  return {mod1(static_cast<double>(c.index[0]) * l + s[0]),
          mod1(static_cast<double>(c.index[1]) * l + s[1])};
}

DyadicCube ShiftedGrid::parent(const DyadicCube& c) const {
  if (c.scale == 0) throw std::invalid_argument("parent: cube at scale 0");
  if (c.grid_id != id) throw std::invalid_argument("parent: cube from a different grid");
  std::int64_t n = std::int64_t{1} << c.scale;
  DyadicCube p{c.dim, c.scale - 1, {0, 0}, id};
  for (int t = 0; t < c.dim; ++t) {
    std::int64_t k = (c.index[static_cast<std::size_t>(t)] -
                      bits[static_cast<std::size_t>(c.scale - 1)][t] % 2 + n) % n;
    p.index[static_cast<std::size_t>(t)] = k >> 1;
  }
  return p;
}

DyadicCube ShiftedGrid::ancestor_at_scale(const DyadicCube& c, int scale) const {
  if (scale > c.scale) throw std::invalid_argument("ancestor_at_scale: target finer than cube");
  DyadicCube a = c;
  while (a.scale > scale) a = parent(a);
  return a;
}

bool ShiftedGrid::contains(const DyadicCube& outer, const DyadicCube& inner) const {
  if (inner.scale < outer.scale) return false;
  return ancestor_at_scale(inner, outer.scale) == outer;
}

ShiftedGrid sample_shift(std::uint64_t seed, int depth, int dim) {
  if (depth < 1) throw std::invalid_argument("sample_shift: depth must be >= 1");
  if (dim != 1 && dim != 2) throw std::invalid_argument("sample_shift: dim must be 1 or 2");
  std::mt19937_64 rng(seed);
  std::vector<std::array<int, 2>> bits(static_cast<std::size_t>(depth), {0, 0});
  for (auto& b : bits)
    for (int t = 0; t < dim; ++t) b[t] = static_cast<int>(rng() & 1u);
  return ShiftedGrid::from_bits(dim, std::move(bits));
}

double cube_distance(const DyadicCube& a, const DyadicCube& b, const ShiftedGrid& grid) {
  auto oa = grid.origin(a);
  auto ob = grid.origin(b);
  double d = 0.0;
  for (int t = 0; t < grid.dim; ++t)
    d = std::max(d, interval_distance(oa[static_cast<std::size_t>(t)], a.side(),
                                      ob[static_cast<std::size_t>(t)], b.side()));
  return d;
}

double distance_to_boundary(const DyadicCube& I, const DyadicCube& T, const ShiftedGrid& grid) {
  auto oi = grid.origin(I);
  auto ot = grid.origin(T);
  double li = I.side(), lt = T.side();
  double best = 1.0;
  for (int axis = 0; axis < grid.dim; ++axis) {
    for (int face = 0; face < 2; ++face) {
      double c = mod1(ot[static_cast<std::size_t>(axis)] + face * lt);
      double d = interval_point_distance(oi[static_cast<std::size_t>(axis)], li, c);
      // L-infinity: the face only extends over T's range on the other axes.
      for (int s = 0; s < grid.dim; ++s) {
        if (s == axis) continue;
        d = std::max(d, interval_distance(oi[static_cast<std::size_t>(s)], li,
                                          ot[static_cast<std::size_t>(s)], lt));
      }
      best = std::min(best, d);
    }
  }
  return best;
}

DyadicCube join(const DyadicCube& I1, const DyadicCube& I2, const ShiftedGrid& grid) {
  if (I1.grid_id != grid.id || I2.grid_id != grid.id)
    throw std::invalid_argument("join: cubes from different grids");
  DyadicCube a = I1, b = I2;
  while (a.scale > b.scale) a = grid.parent(a);
  while (b.scale > a.scale) b = grid.parent(b);
  while (!(a == b)) {
    a = grid.parent(a);
    b = grid.parent(b);
  }
  return a;
}

bool is_good(const DyadicCube& I, const ShiftedGrid& grid, const GoodnessParams& p) {
  if (I.grid_id != grid.id) throw std::invalid_argument("is_good: cube from a different grid");
  double gamma = p.gamma();
  double li = I.side();
  auto oi = grid.origin(I);
  for (int jt = 1; jt <= I.scale - p.r; ++jt) {
    double lt = std::ldexp(1.0, -jt);
    double thr = 2.0 * std::pow(li, gamma) * std::pow(lt, 1.0 - gamma);
    if (grid.dim == 1) {
      // All scale-jt boundaries form one shifted lattice of spacing lt.
      double s = grid.shift_at(jt)[0];
      double u = std::fmod(mod1(oi[0] - s), lt);
      double d = (u + li >= lt) ? 0.0 : std::min(u, lt - (u + li));
      if (d <= thr) return false;
    } else {
      std::int64_t n = std::int64_t{1} << jt;
      bool bad = false;
      for (std::int64_t k0 = 0; k0 < n && !bad; ++k0)
        for (std::int64_t k1 = 0; k1 < n && !bad; ++k1) {
          DyadicCube T = grid.cube(jt, k0, k1);
          if (distance_to_boundary(I, T, grid) <= thr) bad = true;
        }
      if (bad) return false;
    }
  }
  return true;
}

PositionClass relative_position(const DyadicCube& I1, const DyadicCube& I2,
                                const GoodnessParams& p, const ShiftedGrid& grid) {
  if (I1.scale < I2.scale)
    throw std::invalid_argument("relative_position: requires side(I1) <= side(I2)");
  if (I1 == I2) return PositionClass::Equal;
  if (I1.scale > I2.scale && grid.contains(I2, I1)) return PositionClass::Inside;
  double thr = std::pow(I1.side(), p.gamma()) * std::pow(I2.side(), 1.0 - p.gamma());
  if (cube_distance(I1, I2, grid) > thr) return PositionClass::Separated;
  return PositionClass::Nearby;
}

namespace {

ShiftedGrid grid_from_pattern(std::uint64_t pattern, int depth, int dim) {
  std::vector<std::array<int, 2>> bits(static_cast<std::size_t>(depth), {0, 0});
  int pos = 0;
  for (int i = 0; i < depth; ++i)
    for (int t = 0; t < dim; ++t) bits[static_cast<std::size_t>(i)][t] = (pattern >> pos++) & 1;
  return ShiftedGrid::from_bits(dim, std::move(bits));
}

std::int64_t count_good_over_patterns(const GoodnessParams& p, int depth, int scale_of_I,
                                      std::int64_t base0, std::int64_t base1) {
  int nbits = p.dim * depth;
  std::int64_t total = std::int64_t{1} << nbits;
  std::int64_t good = 0;
  for (std::int64_t pat = 0; pat < total; ++pat) {
    ShiftedGrid g = grid_from_pattern(static_cast<std::uint64_t>(pat), depth, p.dim);
    if (is_good(g.cube(scale_of_I, base0, base1), g, p)) ++good;
  }
  return good;
}

}  // namespace

GoodnessEstimate goodness_probability(const GoodnessParams& p, int depth, int scale_of_I,
                                      GoodnessMode mode, std::int64_t samples,
                                      std::uint64_t seed) {
  if (scale_of_I > depth) throw std::invalid_argument("goodness_probability: scale_of_I > depth");
  if (mode == GoodnessMode::Exhaustive) {
    if (p.dim * depth > 20)
      throw std::invalid_argument("goodness_probability: exhaustive mode limited to dim*depth <= 20");
    std::int64_t total = std::int64_t{1} << (p.dim * depth);
    std::int64_t good = count_good_over_patterns(p, depth, scale_of_I, 0, 0);
    // The probability must not depend on the base cube.
    std::int64_t ncubes = std::int64_t{1} << scale_of_I;
    std::int64_t step = std::max<std::int64_t>(1, ncubes / 4);
    for (std::int64_t k = step; k < ncubes; k += step) {
      std::int64_t other = count_good_over_patterns(p, depth, scale_of_I, k,
                                                    p.dim == 2 ? (k % ncubes) : 0);
      if (other != good)
        throw std::logic_error("goodness_probability: estimate depends on the base cube");
    }
    return {static_cast<double>(good) / static_cast<double>(total), 0.0, true, total};
  }
  if (samples < 1) throw std::invalid_argument("goodness_probability: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::int64_t good = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    ShiftedGrid g = sample_shift(rng(), depth, p.dim);
    if (is_good(g.cube(scale_of_I, 0, 0), g, p)) ++good;
  }
  double phat = static_cast<double>(good) / static_cast<double>(samples);
  double se = std::sqrt(phat * (1.0 - phat) / static_cast<double>(samples));
  return {phat, se, false, samples};
}

}  // namespace bpb
