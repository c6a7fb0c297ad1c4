#include "bpb/paraproduct.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bpb/errors.hpp"
#include "bpb/martingale.hpp"

namespace bpb {

double bmo_norm_1p(const AxisFunction& a) {
  double best = 0.0;
  for (int scale = 0; scale <= a.shape.depth; ++scale) {
    std::int64_t nb = a.shape.block(scale);
    std::int64_t nc = a.shape.cubes(scale);
    for (std::int64_t k = 0; k < nc; ++k) {
      auto seg = a.v.segment(k * nb, nb);
      Complex mean = seg.mean();
      double osc = (seg.array() - mean).abs2().mean();
      best = std::max(best, osc);
    }
  }
  return std::sqrt(best);
}

double rect_bmo_norm(const GridFunction& a, const AccretivePair& pair) {
  int n1 = a.shape1.depth, n2 = a.shape2.depth;
  MartingaleCoefficients c = decompose(a, pair);
  // T[p][q](x) = sum of |D[p'][q'](x)|^2 over p' >= p, q' >= q.
  std::vector<std::vector<Eigen::MatrixXd>> T(
      static_cast<std::size_t>(n1 + 1),
      std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n2 + 1)));
  for (int p = n1; p >= 0; --p)
    for (int q = n2; q >= 0; --q) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(a.v.rows(), a.v.cols());
      if (p < n1) t += T[static_cast<std::size_t>(p + 1)][static_cast<std::size_t>(q)];
      if (q < n2) t += T[static_cast<std::size_t>(p)][static_cast<std::size_t>(q + 1)];
      if (p < n1 && q < n2) {
        t -= T[static_cast<std::size_t>(p + 1)][static_cast<std::size_t>(q + 1)];
        t += c.D[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)].v.cwiseAbs2();
      }
      T[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = std::move(t);
    }
  double best = 0.0;
  for (int p = 0; p <= n1; ++p) {
    std::int64_t nb1 = a.shape1.block(p);
    for (int q = 0; q <= n2; ++q) {
      std::int64_t nb2 = a.shape2.block(q);
      const Eigen::MatrixXd& t = T[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
      for (std::int64_t i = 0; i < a.shape1.cubes(p); ++i)
        for (std::int64_t j = 0; j < a.shape2.cubes(q); ++j) {
          // (1/|R|) * integral over R == mean of T over the cell block.
          double val = t.block(i * nb1, j * nb2, nb1, nb2).mean();
          best = std::max(best, val);
        }
    }
  }
  return best;
}

CarlesonSequence CarlesonSequence::zero(AxisShape s) {
  CarlesonSequence seq;
  seq.shape = s;
  seq.c.resize(static_cast<std::size_t>(s.depth) + 1);
  for (int scale = 0; scale <= s.depth; ++scale)
    seq.c[static_cast<std::size_t>(scale)].assign(static_cast<std::size_t>(s.cubes(scale)), 0.0);
  return seq;
}

double carleson_constant(const CarlesonSequence& seq) {
  int depth = seq.shape.depth;
  // S[k] at the current scale = sum of c_I over I contained in cube k.
  std::vector<double> S(seq.c.back().begin(), seq.c.back().end());
  double vol = seq.shape.cell_volume();
  double best = 0.0;
  for (double s : S) best = std::max(best, s / vol);
  for (int scale = depth - 1; scale >= 0; --scale) {
    std::int64_t nc = seq.shape.cubes(scale);
    std::int64_t fan = seq.shape.cubes(1);  // children per cube: 2^dim
    std::vector<double> up(static_cast<std::size_t>(nc));
    double cvol = std::ldexp(1.0, -seq.shape.dim * scale);
    for (std::int64_t k = 0; k < nc; ++k) {
      double sum = seq.c[static_cast<std::size_t>(scale)][static_cast<std::size_t>(k)];
      for (std::int64_t ch = 0; ch < fan; ++ch)
        sum += S[static_cast<std::size_t>(k * fan + ch)];
      up[static_cast<std::size_t>(k)] = sum;
      best = std::max(best, sum / cvol);
    }
    S = std::move(up);
  }
  return best;
}

CarlesonSequence diff_mass_sequence(const AxisFunction& a, const AxisFunction& b) {
  CarlesonSequence seq = CarlesonSequence::zero(a.shape);
  double vol = a.shape.cell_volume();
  for (int p = 0; p < a.shape.depth; ++p) {
    AxisFunction d = diff(a, b, p);
    std::int64_t nb = a.shape.block(p);
    for (std::int64_t k = 0; k < a.shape.cubes(p); ++k)
      seq.c[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)] =
          d.v.segment(k * nb, nb).cwiseAbs2().sum() * vol;
  }
  return seq;
}

AxisFunction partial_paraproduct(const AxisFunction& a, const AxisFunction& f,
                                 const AxisFunction& b_avg, const AxisFunction& b_diff) {
  if (!(a.shape == f.shape)) throw std::invalid_argument("partial_paraproduct: mesh mismatch");
  AxisFunction out = AxisFunction::zero(a.shape);
  for (int p = 0; p < a.shape.depth; ++p) {
    AxisFunction avg = expect(f, b_avg, p);
    AxisFunction da = diff(a, b_diff, p);
    out.v += avg.v.cwiseProduct(b_diff.v).cwiseProduct(da.v);
  }
  return out;
}

AxisFunction partial_paraproduct_herm_adjoint(const AxisFunction& a, const AxisFunction& g,
                                              const AxisFunction& b_avg,
                                              const AxisFunction& b_diff) {
  AxisFunction out = AxisFunction::zero(a.shape);
  for (int p = 0; p < a.shape.depth; ++p) {
    AxisFunction da = diff(a, b_diff, p);
    Eigen::VectorXcd m = b_diff.v.cwiseProduct(da.v).conjugate().cwiseProduct(g.v);
    // Hermitian adjoint of expect: conj(b) averages against conj(weight mass).
    std::int64_t nb = a.shape.block(p);
    for (std::int64_t k = 0; k < a.shape.cubes(p); ++k) {
      std::int64_t r0 = k * nb;
      Complex bsum = b_avg.v.segment(r0, nb).sum();
      if (std::abs(bsum) < 1e-300)
        throw DegenerateWeightError("partial_paraproduct_herm_adjoint: degenerate weight");
      Complex s = m.segment(r0, nb).sum() / std::conj(bsum);
      out.v.segment(r0, nb) += b_avg.v.segment(r0, nb).conjugate() * s;
    }
  }
  return out;
}

GridFunction full_paraproduct(const GridFunction& a, const GridFunction& f,
                              const AccretivePair& pair_avg, const AccretivePair& pair_diff) {
  require_same_mesh(a, f, "full_paraproduct");
  int n1 = a.shape1.depth, n2 = a.shape2.depth;
  GridFunction btensor = tensor(pair_diff.b1, pair_diff.b2);
  GridFunction out = GridFunction::zero(a.shape1, a.shape2);
  for (int p = 0; p < n1; ++p) {
    GridFunction fp = expect(f, pair_avg.b1, 1, p);
    GridFunction dap = diff(a, pair_diff.b1, 1, p);
    for (int q = 0; q < n2; ++q) {
      GridFunction fpq = expect(fp, pair_avg.b2, 2, q);
      GridFunction dapq = diff(dap, pair_diff.b2, 2, q);
      out.v += fpq.v.cwiseProduct(btensor.v).cwiseProduct(dapq.v);
    }
  }
  return out;
}

GridFunction full_paraproduct_herm_adjoint(const GridFunction& a, const GridFunction& g,
                                           const AccretivePair& pair_avg,
                                           const AccretivePair& pair_diff) {
  int n1 = a.shape1.depth, n2 = a.shape2.depth;
  GridFunction btensor = tensor(pair_diff.b1, pair_diff.b2);
  GridFunction out = GridFunction::zero(a.shape1, a.shape2);
  for (int p = 0; p < n1; ++p) {
    GridFunction dap = diff(a, pair_diff.b1, 1, p);
    for (int q = 0; q < n2; ++q) {
      GridFunction dapq = diff(dap, pair_diff.b2, 2, q);
      GridFunction m{a.shape1, a.shape2,
                     btensor.v.cwiseProduct(dapq.v).conjugate().cwiseProduct(g.v)};
      GridFunction h = expect_herm_adjoint(m, pair_avg.b1, 1, p);
      out.v += expect_herm_adjoint(h, pair_avg.b2, 2, q).v;
    }
  }
  return out;
}

GridFunction mixed_paraproduct(const GridFunction& a, const GridFunction& f,
                               const AccretivePair& pair_avg, const AccretivePair& pair_diff) {
  require_same_mesh(a, f, "mixed_paraproduct");
  int n1 = a.shape1.depth, n2 = a.shape2.depth;
  GridFunction btensor = tensor(pair_diff.b1, pair_diff.b2);
  GridFunction out = GridFunction::zero(a.shape1, a.shape2);
  for (int q = 0; q < n2; ++q) {
    GridFunction fq = expect(f, pair_avg.b2, 2, q);
    GridFunction daq = diff(a, pair_diff.b2, 2, q);
    for (int p = 0; p < n1; ++p) {
      GridFunction dapq = diff(daq, pair_diff.b1, 1, p);
      GridFunction inner{a.shape1, a.shape2,
                         fq.v.cwiseProduct(btensor.v).cwiseProduct(dapq.v)};
      out.v += adjoint_expect_axis(inner, pair_avg.b1, 1, p).v;
    }
  }
  return out;
}

GridFunction mixed_paraproduct_herm_adjoint(const GridFunction& a, const GridFunction& g,
                                            const AccretivePair& pair_avg,
                                            const AccretivePair& pair_diff) {
  int n1 = a.shape1.depth, n2 = a.shape2.depth;
  GridFunction btensor = tensor(pair_diff.b1, pair_diff.b2);
  GridFunction out = GridFunction::zero(a.shape1, a.shape2);
  for (int q = 0; q < n2; ++q) {
    GridFunction daq = diff(a, pair_diff.b2, 2, q);
    for (int p = 0; p < n1; ++p) {
      GridFunction dapq = diff(daq, pair_diff.b1, 1, p);
      GridFunction h = adjoint_expect_axis_herm_adjoint(g, pair_avg.b1, 1, p);
      GridFunction m{a.shape1, a.shape2,
                     btensor.v.cwiseProduct(dapq.v).conjugate().cwiseProduct(h.v)};
      out.v += expect_herm_adjoint(m, pair_avg.b2, 2, q).v;
    }
  }
  return out;
}

NormEstimate operator_norm_estimate(const GridMap& apply, const GridMap& apply_adjoint,
                                    AxisShape shape1, AxisShape shape2, int trials, int iters,
                                    std::uint64_t seed) {
  if (trials < 1 || iters < 2) throw std::invalid_argument("operator_norm_estimate: bad budget");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  NormEstimate best;
  for (int t = 0; t < trials; ++t) {
    GridFunction v = GridFunction::zero(shape1, shape2);
    for (Eigen::Index r = 0; r < v.v.rows(); ++r)
      for (Eigen::Index c = 0; c < v.v.cols(); ++c) v.v(r, c) = Complex(gauss(rng), gauss(rng));
    double est = 0.0, prev = 0.0;
    for (int it = 0; it < iters; ++it) {
      double nv = std::sqrt(v.v.cwiseAbs2().sum() * v.cell_volume());
      if (!std::isfinite(nv)) throw NumericFailureError("operator_norm_estimate: non-finite iterate");
      if (nv < 1e-300) break;  // start landed in the kernel
      v.v /= nv;
      GridFunction av = apply(v);
      double nav = std::sqrt(av.v.cwiseAbs2().sum() * av.cell_volume());
      if (!std::isfinite(nav))
        throw NumericFailureError("operator_norm_estimate: non-finite iterate");
      prev = est;
      est = nav;
      v = apply_adjoint(av);
    }
    if (est > best.value) {
      best.value = est;
      best.gap = est > 0.0 ? std::abs(est - prev) / est : 0.0;
    }
  }
  return best;
}

}  // namespace bpb
