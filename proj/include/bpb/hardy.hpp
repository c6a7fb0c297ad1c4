#pragma once

#include <string>
#include <vector>

#include "bpb/accretive.hpp"
#include "bpb/grid_function.hpp"
#include "bpb/martingale.hpp"

namespace bpb {

/// Stopping time on the bi-parameter mesh: for each scale pair (p, q) the
/// indicator of {x : (p,q) in tau(x)}, stored at finest-cell resolution but
/// constant on generation-(p,q) rectangles by construction.
struct StoppingTime {
  AxisShape shape1, shape2;
  /// mask[p][q] has 0/1 entries; p = 0..N1, q = 0..N2.
  std::vector<std::vector<Eigen::ArrayXXd>> mask;

  /// Indicator of F = {x : tau(x) is not the full scale set}.
  Eigen::ArrayXXd F() const;
  double F_measure() const;
};

/// tau(x) = {(p,q) : every (p',q') <= (p,q) has plain dyadic average of
/// chi_F over the generation-(p',q') rectangle at x at most 1/2}.
StoppingTime build_stopping_time(const Eigen::ArrayXXd& F_indicator, AxisShape shape1,
                                 AxisShape shape2);

/// Stopped sum: at each x, the sum of the double differences D[p][q](x)
/// over scale pairs (p,q) in tau(x).
GridFunction stopped_sum(const MartingaleCoefficients& coeffs, const StoppingTime& tau);

struct Atom {
  GridFunction a;
  StoppingTime tau;
  int level = 0;
  double lambda = 0.0;
};

struct AtomCertificate {
  bool nontrivial = false;          // F smaller than the whole torus
  double f_measure = 0.0;
  double property2_residual = 0.0;  // max |mask(p+1,q+1) * E_{p,q} a|
  double support_residual = 0.0;    // max of maximal/square function off F
  double maximal_l2 = 0.0;
  double atom_constant = 0.0;       // maximal_l2 * sqrt(|F|)
  bool passed = false;
};

struct AtomicDecomposition {
  std::vector<Atom> atoms;          // ordered by level, degenerate levels dropped
  double sum_abs_lambda = 0.0;
  double square_l1 = 0.0;           // L1 norm of the square function of f
  int level_lo = 0, level_hi = 0;   // scanned threshold exponents
};

/// Constructive atomic decomposition of a b-mean-zero f via stopping times
/// on the level sets of the square function. Reconstruction of f from
/// sum lambda_n * a_n is exact up to roundoff.
AtomicDecomposition atomic_decompose(const GridFunction& f, const AccretivePair& pair);

AtomCertificate verify_atom(const Atom& atom, const AccretivePair& pair, double tol = 1e-10);

struct H1Report {
  double maximal_l1 = 0.0;
  double square_l1 = 0.0;
  double ratio = 0.0;
  bool ratio_defined = false;
};

H1Report h1_report(const GridFunction& f, const AccretivePair& pair);

std::string to_json(const AtomicDecomposition& dec, const AccretivePair& pair);

}  // namespace bpb
