#pragma once

#include <string>
#include <vector>

#include "bpb/accretive.hpp"
#include "bpb/grid_function.hpp"

namespace bpb {

/// b-adapted conditional expectation at scale p along one axis: on each
/// scale-p cube, replaces f by its b-weighted average in that variable.
/// p = depth is the identity.
GridFunction expect(const GridFunction& f, const AxisFunction& b, int axis, int p);

/// Martingale difference along one axis: expect(p+1) - expect(p).
GridFunction diff(const GridFunction& f, const AxisFunction& b, int axis, int p);

/// One-variable versions of the expectation and difference.
AxisFunction expect(const AxisFunction& f, const AxisFunction& b, int p);
AxisFunction diff(const AxisFunction& f, const AxisFunction& b, int p);

/// Double difference in both axes; the two composition orders agree and the
/// implementation cross-checks them.
GridFunction double_diff(const GridFunction& f, const AccretivePair& pair, int p, int q);

/// Double difference restricted to the dyadic rectangle I x J (I at scale p
/// on axis 1, J at scale q on axis 2; standard-grid indices).
GridFunction double_diff_local(const GridFunction& f, const AccretivePair& pair, int p, int q,
                               const DyadicCube& I, const DyadicCube& J);

/// Adjoint expectation E* at scales (p, q): b(x) times the rectangle ratio
/// of plain integrals of f to integrals of b.
GridFunction adjoint_expect(const GridFunction& f, const AccretivePair& pair, int p, int q);
/// One-axis adjoint expectation.
GridFunction adjoint_expect_axis(const GridFunction& f, const AxisFunction& b, int axis, int p);
/// One-axis adjoint difference: adjoint_expect_axis(p+1) - adjoint_expect_axis(p).
GridFunction adjoint_diff_axis(const GridFunction& f, const AxisFunction& b, int axis, int p);
/// Double adjoint difference in both axes.
GridFunction adjoint_diff(const GridFunction& f, const AccretivePair& pair, int p, int q);

// Hermitian (inner-product) adjoints, used by power iteration. These satisfy
// <T f, g> = <f, T^H g> in the sesquilinear pairing.
GridFunction expect_herm_adjoint(const GridFunction& g, const AxisFunction& b, int axis, int p);
GridFunction diff_herm_adjoint(const GridFunction& g, const AxisFunction& b, int axis, int p);
GridFunction adjoint_expect_axis_herm_adjoint(const GridFunction& g, const AxisFunction& b,
                                              int axis, int p);

/// Exact telescoping decomposition of f: double differences plus the three
/// coarse-boundary families (row, column, corner).
struct MartingaleCoefficients {
  AxisShape shape1, shape2;
  /// D[p][q] for p in 0..N1-1, q in 0..N2-1.
  std::vector<std::vector<GridFunction>> D;
  /// row[p] = (difference at p on axis 1) of (coarsest expectation on axis 2).
  std::vector<GridFunction> row;
  /// col[q] = (coarsest expectation on axis 1) of (difference at q on axis 2).
  std::vector<GridFunction> col;
  GridFunction corner;
};

MartingaleCoefficients decompose(const GridFunction& f, const AccretivePair& pair);
GridFunction reconstruct(const MartingaleCoefficients& coeffs);

/// Square function: sqrt of the sum of |D[p][q]|^2 over all double
/// differences, pointwise.
GridFunction square_function(const GridFunction& f, const AccretivePair& pair);

/// Maximal function: pointwise sup of |E_p E_q f| over all scale pairs
/// including the identity scales.
GridFunction maximal_function(const GridFunction& f, const AccretivePair& pair);

/// Removes the coarsest b-adapted component on each axis, so that the
/// decomposition of the result has vanishing row/column/corner parts.
GridFunction project_mean_zero(const GridFunction& f, const AccretivePair& pair);

std::string to_json(const MartingaleCoefficients& coeffs);

}  // namespace bpb
