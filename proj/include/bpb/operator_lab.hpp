#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bpb/accretive.hpp"
#include "bpb/dyadic.hpp"
#include "bpb/grid_function.hpp"

namespace bpb {

// This module works on the bi-parameter torus with one-dimensional axes
// (dim1 = dim2 = 1); higher axis dimensions are rejected at the call sites.

/// A singular kernel evaluated off the diagonal (x1 != y1 and x2 != y2).
struct KernelSpec {
  std::function<Complex(double x1, double x2, double y1, double y2)> eval;
  double size_constant = 1.0;
  double holder = 1.0;  // delta in (0,1]
  bool antisym1 = false, antisym2 = false;
  std::string name;
};

/// Named kernels: "product_hilbert" (1/((x1-y1)(x2-y2))) and "bicommutator"
/// (product Hilbert times the second-order difference quotient of a default
/// smooth A). Throws on unknown names.
KernelSpec builtin_kernel(const std::string& name);

/// Bicommutator kernel for a caller-supplied A with bounded mixed
/// derivative.
KernelSpec bicommutator_kernel(std::function<double(double, double)> A, std::string name);

/// Quadrature bilinear form: sum of K(x,y) f(y) g(x) b(y) b'(x) over
/// ordered pairs of finest cells, with cell pairs sharing an axis-1 cell or
/// an axis-2 cell skipped (principal-value convention).
Complex bilinear_form(const KernelSpec& K, const GridFunction& f, const GridFunction& g,
                      const AccretivePair& pair_b, const AccretivePair& pair_bp);

/// One-variable kernel obtained by integrating out the second variable
/// against fixed f2, g2 and weights; evaluation on x1 == y1 is rejected.
std::function<Complex(double, double)> partial_kernel_from_full(
    const KernelSpec& K, const AxisFunction& f2, const AxisFunction& g2, const AxisFunction& b2,
    const AxisFunction& b2p);

struct PairingReport {
  DyadicCube I1, J1, I2, J2;
  PositionClass position1 = PositionClass::Nearby;
  PositionClass position2 = PositionClass::Nearby;
  int gap1 = 0, gap2 = 0;
  Complex pairing{0.0, 0.0};
  double normalized = 0.0;
};

/// Pairing of localized double differences of f and g on the two dyadic
/// rectangles I1 x J1 and I2 x J2, with position taxonomy and the
/// geometry-normalized magnitude attached.
PairingReport projection_pairing(const KernelSpec& K, const GridFunction& f,
                                 const GridFunction& g, const DyadicCube& I1,
                                 const DyadicCube& J1, const DyadicCube& I2,
                                 const DyadicCube& J2, const AccretivePair& pair_b,
                                 const AccretivePair& pair_bp, const GoodnessParams& params);

struct ExpansionReport {
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
  double gap = 0.0;  // relative when lhs != 0, absolute otherwise
};

/// Verifies that the bilinear form of f against g equals the sum of the
/// forms over all pairs of martingale components (double differences plus
/// boundary terms). Guarded to depth <= 4 per axis.
ExpansionReport expansion_check(const KernelSpec& K, const GridFunction& f,
                                const GridFunction& g, const AccretivePair& pair_b,
                                const AccretivePair& pair_bp);

struct DecayCell {
  int i1 = 0, j1 = 0;
  std::int64_t n_pairs = 0;
  double max_normalized = 0.0;
};

struct DecayScan {
  std::vector<DecayCell> cells;
  double slope_i = 0.0, slope_j = 0.0;
  bool slopes_defined = false;
};

/// Measures the decay of normalized separated/separated pairings as a
/// function of the scale gaps (i1 in variable 1, j1 in variable 2). The
/// larger cube of each pair sits one level below the common ancestor; the
/// smaller cube must be good for the given parameters; at most 512
/// qualifying pairs per (i1, j1), chosen in index order. Least-squares fit
/// of log2(max) against (i1, j1) gives the two slopes.
DecayScan decay_scan(const KernelSpec& K, const AccretivePair& pair_b,
                     const AccretivePair& pair_bp, const GoodnessParams& params, int depth);

std::string to_csv(const DecayScan& scan);

struct WbpReport {
  double sup = 0.0;
  int witness_p = 0, witness_q = 0;
  std::int64_t witness_i = 0, witness_j = 0;
};

/// sup over dyadic rectangles R = K x V of |<M_b' T M_b chi_R, chi_R>| /
/// |R|, exhaustively within the depth.
WbpReport wbp_scan(const KernelSpec& K, const AccretivePair& pair_b,
                   const AccretivePair& pair_bp, int depth1, int depth2);

struct TbProbe {
  std::string name;
  GridFunction probe;
  double rect_bmo = 0.0;
};

/// The four testing functions of the theorem's hypotheses: T applied to the
/// tensor weight of pair_b, its transpose applied to that of pair_bp, and
/// the partial-adjoint variants applied to the two crossed weights; each
/// with its rectangular-BMO surrogate (computed against the unit weight).
std::vector<TbProbe> tb_probe(const KernelSpec& K, const AccretivePair& pair_b,
                              const AccretivePair& pair_bp);

}  // namespace bpb
