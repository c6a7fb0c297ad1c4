#include "bpb/operator_lab.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bpb/errors.hpp"
#include "bpb/martingale.hpp"
#include "bpb/paraproduct.hpp"

namespace bpb {

namespace {

void require_dim1(const GridFunction& f, const char* where) {
  if (f.shape1.dim != 1 || f.shape2.dim != 1)
    throw std::invalid_argument(std::string(where) + ": one-dimensional axes required");
}

// Quadrature of K(x,y) u(y) w(x) over cell blocks, skipping pairs that
// share an axis-1 cell or an axis-2 cell.
Complex quad_blocks(const KernelSpec& K, const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& w,
                    std::int64_t yr0, std::int64_t ynr, std::int64_t yc0, std::int64_t ync,
                    std::int64_t xr0, std::int64_t xnr, std::int64_t xc0, std::int64_t xnc,
                    double h1, double h2) {
  Complex total{0.0, 0.0};
  for (std::int64_t xr = xr0; xr < xr0 + xnr; ++xr) {
    double x1 = (static_cast<double>(xr) + 0.5) * h1;
    for (std::int64_t xc = xc0; xc < xc0 + xnc; ++xc) {
      Complex wx = w(xr, xc);
      if (wx == Complex{0.0, 0.0}) continue;
      double x2 = (static_cast<double>(xc) + 0.5) * h2;
      Complex inner{0.0, 0.0};
      for (std::int64_t yr = yr0; yr < yr0 + ynr; ++yr) {
        if (yr == xr) continue;
        double y1 = (static_cast<double>(yr) + 0.5) * h1;
        for (std::int64_t yc = yc0; yc < yc0 + ync; ++yc) {
          if (yc == xc) continue;
          Complex uy = u(yr, yc);
          if (uy == Complex{0.0, 0.0}) continue;
          double y2 = (static_cast<double>(yc) + 0.5) * h2;
          inner += K.eval(x1, x2, y1, y2) * uy;
        }
      }
      total += wx * inner;
    }
  }
  double vol = h1 * h2;
  return total * vol * vol;
}

Eigen::MatrixXcd weighted(const GridFunction& f, const AccretivePair& pair) {
  return f.v.cwiseProduct(pair.b1.v * pair.b2.v.transpose());
}

}  // namespace

KernelSpec builtin_kernel(const std::string& name) {
  if (name == "product_hilbert") {
    KernelSpec k;
    k.eval = [](double x1, double x2, double y1, double y2) {
      return Complex(1.0 / ((x1 - y1) * (x2 - y2)), 0.0);
    };
    k.size_constant = 1.0;
    k.holder = 1.0;
    k.antisym1 = k.antisym2 = true;
    k.name = name;
    return k;
  }
  if (name == "bicommutator") {
    constexpr double tp = 2.0 * std::numbers::pi;
    return bicommutator_kernel(
        [](double s, double t) { return std::sin(tp * s) * std::sin(tp * t) / (tp * tp); },
        name);
  }
  throw std::invalid_argument("builtin_kernel: unknown kernel '" + name + "'");
}

KernelSpec bicommutator_kernel(std::function<double(double, double)> A, std::string name) {
  KernelSpec k;
  k.eval = [A = std::move(A)](double x1, double x2, double y1, double y2) {
    double d = (x1 - y1) * (x2 - y2);
    double num = A(x1, x2) + A(y1, y2) - A(y1, x2) - A(x1, y2);
    return Complex(num / (d * d), 0.0);
  };
  k.size_constant = 1.0;
  k.holder = 1.0;
  k.antisym1 = k.antisym2 = true;
  k.name = std::move(name);
  return k;
}

Complex bilinear_form(const KernelSpec& K, const GridFunction& f, const GridFunction& g,
                      const AccretivePair& pair_b, const AccretivePair& pair_bp) {
  require_same_mesh(f, g, "bilinear_form");
  require_dim1(f, "bilinear_form");
  Eigen::MatrixXcd u = weighted(f, pair_b);
  Eigen::MatrixXcd w = weighted(g, pair_bp);
  double h1 = f.shape1.cell_volume(), h2 = f.shape2.cell_volume();
  return quad_blocks(K, u, w, 0, f.shape1.cells(), 0, f.shape2.cells(), 0, f.shape1.cells(), 0,
                     f.shape2.cells(), h1, h2);
}

std::function<Complex(double, double)> partial_kernel_from_full(
    const KernelSpec& K, const AxisFunction& f2, const AxisFunction& g2, const AxisFunction& b2,
    const AxisFunction& b2p) {
  if (!(f2.shape == g2.shape) || !(f2.shape == b2.shape) || !(f2.shape == b2p.shape))
    throw std::invalid_argument("partial_kernel_from_full: mesh mismatch");
  if (f2.shape.dim != 1)
    throw std::invalid_argument("partial_kernel_from_full: one-dimensional axis required");
  Eigen::VectorXcd u = f2.v.cwiseProduct(b2.v);
  Eigen::VectorXcd w = g2.v.cwiseProduct(b2p.v);
  double h2 = f2.shape.cell_volume();
  auto eval = K.eval;
  return [=](double x1, double y1) {
    if (std::abs(x1 - y1) < 1e-15)
      throw std::invalid_argument("partial kernel: evaluation on the diagonal x1 == y1");
    Complex total{0.0, 0.0};
    Eigen::Index n = u.size();
    for (Eigen::Index xc = 0; xc < n; ++xc) {
      if (w(xc) == Complex{0.0, 0.0}) continue;
      double x2 = (static_cast<double>(xc) + 0.5) * h2;
      Complex inner{0.0, 0.0};
      for (Eigen::Index yc = 0; yc < n; ++yc) {
        if (yc == xc || u(yc) == Complex{0.0, 0.0}) continue;
        double y2 = (static_cast<double>(yc) + 0.5) * h2;
        inner += eval(x1, x2, y1, y2) * u(yc);
      }
      total += w(xc) * inner;
    }
    return total * h2 * h2;
  };
}

PairingReport projection_pairing(const KernelSpec& K, const GridFunction& f,
                                 const GridFunction& g, const DyadicCube& I1,
                                 const DyadicCube& J1, const DyadicCube& I2,
                                 const DyadicCube& J2, const AccretivePair& pair_b,
                                 const AccretivePair& pair_bp, const GoodnessParams& params) {
  require_dim1(f, "projection_pairing");
  PairingReport rep;
  rep.I1 = I1;
  rep.J1 = J1;
  rep.I2 = I2;
  rep.J2 = J2;

  GridFunction pf = double_diff_local(f, pair_b, I1.scale, J1.scale, I1, J1);
  GridFunction pg = double_diff_local(g, pair_bp, I2.scale, J2.scale, I2, J2);
  rep.pairing = bilinear_form(K, pf, pg, pair_b, pair_bp);

  ShiftedGrid grid1 = ShiftedGrid::standard(f.shape1.depth, 1);
  ShiftedGrid grid2 = ShiftedGrid::standard(f.shape2.depth, 1);
  auto on_grid = [](const DyadicCube& c, const ShiftedGrid& g2) {
    DyadicCube cc = c;
    cc.grid_id = g2.id;
    return cc;
  };
  DyadicCube A1 = on_grid(I1, grid1), A2 = on_grid(I2, grid1);
  DyadicCube B1 = on_grid(J1, grid2), B2 = on_grid(J2, grid2);
  const DyadicCube& s1 = A1.scale >= A2.scale ? A1 : A2;
  const DyadicCube& l1 = A1.scale >= A2.scale ? A2 : A1;
  const DyadicCube& s2 = B1.scale >= B2.scale ? B1 : B2;
  const DyadicCube& l2 = B1.scale >= B2.scale ? B2 : B1;
  rep.position1 = relative_position(s1, l1, params, grid1);
  rep.position2 = relative_position(s2, l2, params, grid2);
  DyadicCube K1 = join(A1, A2, grid1);
  DyadicCube V1 = join(B1, B2, grid2);
  rep.gap1 = s1.scale - K1.scale;
  rep.gap2 = s2.scale - V1.scale;

  double geom = std::sqrt(A1.side() * A2.side()) / K1.side() *
                std::sqrt(B1.side() * B2.side()) / V1.side();
  double nf = norms(pf).l2, ng = norms(pg).l2;
  rep.normalized = (geom > 0.0 && nf > 0.0 && ng > 0.0)
                       ? std::abs(rep.pairing) / (geom * nf * ng)
                       : 0.0;
  return rep;
}

ExpansionReport expansion_check(const KernelSpec& K, const GridFunction& f,
                                const GridFunction& g, const AccretivePair& pair_b,
                                const AccretivePair& pair_bp) {
  require_dim1(f, "expansion_check");
  if (f.shape1.depth > 4 || f.shape2.depth > 4)
    throw std::invalid_argument("expansion_check: depth must be at most 4 per axis");
  ExpansionReport rep;
  rep.lhs = bilinear_form(K, f, g, pair_b, pair_bp);

  auto components = [](const GridFunction& h, const AccretivePair& pair) {
    MartingaleCoefficients c = decompose(h, pair);
    std::vector<GridFunction> out;
    for (auto& rowD : c.D)
      for (auto& d : rowD) out.push_back(std::move(d));
    for (auto& r : c.row) out.push_back(std::move(r));
    for (auto& cc : c.col) out.push_back(std::move(cc));
    out.push_back(std::move(c.corner));
    return out;
  };
  std::vector<GridFunction> cf = components(f, pair_b);
  std::vector<GridFunction> cg = components(g, pair_bp);
  for (const auto& a : cf)
    for (const auto& b : cg) rep.rhs += bilinear_form(K, a, b, pair_b, pair_bp);

  double denom = std::abs(rep.lhs);
  rep.gap = denom > 0.0 ? std::abs(rep.lhs - rep.rhs) / denom : std::abs(rep.lhs - rep.rhs);
  return rep;
}

namespace {

// One qualifying axis configuration for the decay scan: a small cube and a
// large cube, separated, with the large cube one level below their common
// ancestor.
struct AxisConf {
  int kscale = 0;
  int jsmall = 0, jbig = 0;
  std::int64_t small_idx = 0, big_idx = 0;
};

double mod1(double x) {
  double y = std::fmod(x, 1.0);
  return y < 0.0 ? y + 1.0 : y;
}

std::vector<AxisConf> axis_configurations(int depth, int gap, const GoodnessParams& params,
                                          std::size_t cap) {
  std::vector<AxisConf> out;
  double gamma = params.gamma();
  ShiftedGrid grid = ShiftedGrid::standard(depth, 1);
  for (int kscale = 0; kscale + gap <= depth - 1 && kscale + 1 <= depth - 1; ++kscale) {
    int jsmall = kscale + gap, jbig = kscale + 1;
    double ls = std::ldexp(1.0, -jsmall), lb = std::ldexp(1.0, -jbig);
    double thr = std::pow(ls, gamma) * std::pow(lb, 1.0 - gamma);
    for (std::int64_t kk = 0; kk < (std::int64_t{1} << kscale); ++kk) {
      for (std::int64_t s = kk << gap; s < ((kk + 1) << gap); ++s) {
        double a1 = static_cast<double>(s) * ls;
        for (std::int64_t b = 2 * kk; b < 2 * kk + 2; ++b) {
          double a2 = static_cast<double>(b) * lb;
          if (std::max(a1, a2) < std::min(a1 + ls, a2 + lb)) continue;  // overlap
          if ((s >> (jsmall - jbig)) == b) continue;                    // nested
          double d = std::min(mod1(a2 - (a1 + ls)), mod1(a1 - (a2 + lb)));
          if (d <= thr) continue;  // not separated
          if (!is_good(grid.cube(jsmall, s), grid, params)) continue;
          out.push_back({kscale, jsmall, jbig, s, b});
          if (out.size() >= cap) return out;
        }
      }
    }
  }
  return out;
}

// L2-normalized single-shape profile in the range of the scale-j difference
// localized on the cube with the given index.
AxisFunction cube_profile(AxisShape shape, const AxisFunction& b, int j, std::int64_t idx) {
  AxisFunction e = AxisFunction::zero(shape);
  std::int64_t nb = shape.block(j);
  e.v.segment(idx * nb, nb / 2).setOnes();
  AxisFunction psi = diff(e, b, j);
  double n = norms(psi).l2;
  if (n < 1e-300) throw NumericFailureError("decay_scan: degenerate profile");
  psi.v /= n;
  return psi;
}

}  // namespace

DecayScan decay_scan(const KernelSpec& K, const AccretivePair& pair_b,
                     const AccretivePair& pair_bp, const GoodnessParams& params, int depth) {
  if (pair_b.b1.shape.dim != 1 || pair_b.b2.shape.dim != 1)
    throw std::invalid_argument("decay_scan: one-dimensional axes required");
  AxisShape shape{depth, 1};
  double h = shape.cell_volume();
  // 22 configurations per axis keeps the pair budget within 512 per cell.
  constexpr std::size_t kAxisCap = 22;

  DecayScan scan;
  std::vector<std::vector<AxisConf>> confs1(static_cast<std::size_t>(depth));
  std::vector<std::vector<AxisConf>> confs2(static_cast<std::size_t>(depth));
  for (int gap = 1; gap <= depth - 1; ++gap) {
    confs1[static_cast<std::size_t>(gap)] = axis_configurations(depth, gap, params, kAxisCap);
    confs2[static_cast<std::size_t>(gap)] = confs1[static_cast<std::size_t>(gap)];
  }

  for (int i1 = 1; i1 <= depth - 1; ++i1)
    for (int j1 = 1; j1 <= depth - 1; ++j1) {
      DecayCell cell;
      cell.i1 = i1;
      cell.j1 = j1;
      const auto& ca = confs1[static_cast<std::size_t>(i1)];
      const auto& cb = confs2[static_cast<std::size_t>(j1)];
      for (const AxisConf& a : ca) {
        AxisFunction psi_a = cube_profile(shape, pair_b.b1, a.jsmall, a.small_idx);
        AxisFunction phi_a = cube_profile(shape, pair_bp.b1, a.jbig, a.big_idx);
        Eigen::VectorXcd ua = psi_a.v.cwiseProduct(pair_b.b1.v);
        Eigen::VectorXcd wa = phi_a.v.cwiseProduct(pair_bp.b1.v);
        for (const AxisConf& b : cb) {
          AxisFunction psi_b = cube_profile(shape, pair_b.b2, b.jsmall, b.small_idx);
          AxisFunction phi_b = cube_profile(shape, pair_bp.b2, b.jbig, b.big_idx);
          Eigen::VectorXcd ub = psi_b.v.cwiseProduct(pair_b.b2.v);
          Eigen::VectorXcd wb = phi_b.v.cwiseProduct(pair_bp.b2.v);

          std::int64_t ys0 = a.small_idx * shape.block(a.jsmall), yns = shape.block(a.jsmall);
          std::int64_t yt0 = b.small_idx * shape.block(b.jsmall), ynt = shape.block(b.jsmall);
          std::int64_t xs0 = a.big_idx * shape.block(a.jbig), xns = shape.block(a.jbig);
          std::int64_t xt0 = b.big_idx * shape.block(b.jbig), xnt = shape.block(b.jbig);
          Complex total{0.0, 0.0};
          for (std::int64_t xr = xs0; xr < xs0 + xns; ++xr) {
            double x1 = (static_cast<double>(xr) + 0.5) * h;
            for (std::int64_t xc = xt0; xc < xt0 + xnt; ++xc) {
              double x2 = (static_cast<double>(xc) + 0.5) * h;
              Complex inner{0.0, 0.0};
              for (std::int64_t yr = ys0; yr < ys0 + yns; ++yr) {
                double y1 = (static_cast<double>(yr) + 0.5) * h;
                for (std::int64_t yc = yt0; yc < yt0 + ynt; ++yc) {
                  double y2 = (static_cast<double>(yc) + 0.5) * h;
                  inner += K.eval(x1, x2, y1, y2) * (ua(yr) * ub(yc));
                }
              }
              total += wa(xr) * wb(xc) * inner;
            }
          }
          total *= h * h * h * h;

          double geom = std::sqrt(std::ldexp(1.0, -a.jsmall) * std::ldexp(1.0, -a.jbig)) /
                        std::ldexp(1.0, -a.kscale) *
                        std::sqrt(std::ldexp(1.0, -b.jsmall) * std::ldexp(1.0, -b.jbig)) /
                        std::ldexp(1.0, -b.kscale);
          double mag = std::abs(total) / geom;  // profiles are unit-normalized
          ++cell.n_pairs;
          cell.max_normalized = std::max(cell.max_normalized, mag);
        }
      }
      scan.cells.push_back(cell);
    }

  // Two-variable least-squares fit of log2(max) on (i1, j1).
  std::vector<Eigen::Vector3d> rows;
  Eigen::VectorXd ys;
  std::vector<double> yvals;
  for (const DecayCell& c : scan.cells)
    if (c.n_pairs > 0 && c.max_normalized > 0.0) {
      rows.push_back({static_cast<double>(c.i1), static_cast<double>(c.j1), 1.0});
      yvals.push_back(std::log2(c.max_normalized));
    }
  if (rows.size() >= 3) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      X.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      y(static_cast<Eigen::Index>(r)) = yvals[r];
    }
    Eigen::Matrix3d XtX = X.transpose() * X;
    if (std::abs(XtX.determinant()) > 1e-9) {
      Eigen::Vector3d beta = XtX.ldlt().solve(X.transpose() * y);
      scan.slope_i = beta(0);
      scan.slope_j = beta(1);
      scan.slopes_defined = true;
    }
  }
  return scan;
}

std::string to_csv(const DecayScan& scan) {
  std::ostringstream os;
  os << "i1,j1,n_pairs,max_normalized,slope_fit_i,slope_fit_j\n";
  char buf[128];
  for (const DecayCell& c : scan.cells) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%lld,%.17g,%.17g,%.17g\n", c.i1, c.j1,
                  static_cast<long long>(c.n_pairs), c.max_normalized, scan.slope_i,
                  scan.slope_j);
    os << buf;
  }
  return os.str();
}

WbpReport wbp_scan(const KernelSpec& K, const AccretivePair& pair_b,
                   const AccretivePair& pair_bp, int depth1, int depth2) {
  AxisShape s1{depth1, 1}, s2{depth2, 1};
  if (pair_b.b1.shape.cells() != s1.cells() || pair_b.b2.shape.cells() != s2.cells())
    throw std::invalid_argument("wbp_scan: weight resolution mismatch");
  Eigen::MatrixXcd u = pair_b.b1.v * pair_b.b2.v.transpose();
  Eigen::MatrixXcd w = pair_bp.b1.v * pair_bp.b2.v.transpose();
  double h1 = s1.cell_volume(), h2 = s2.cell_volume();
  WbpReport rep;
  for (int p = 0; p <= depth1; ++p)
    for (int q = 0; q <= depth2; ++q) {
      std::int64_t nb1 = s1.block(p), nb2 = s2.block(q);
      double area = std::ldexp(1.0, -p - q);
      for (std::int64_t i = 0; i < s1.cubes(p); ++i)
        for (std::int64_t j = 0; j < s2.cubes(q); ++j) {
          Complex val = quad_blocks(K, u, w, i * nb1, nb1, j * nb2, nb2, i * nb1, nb1, j * nb2,
                                    nb2, h1, h2);
          double normalized = std::abs(val) / area;
          if (normalized > rep.sup) {
            rep.sup = normalized;
            rep.witness_p = p;
            rep.witness_q = q;
            rep.witness_i = i;
            rep.witness_j = j;
          }
        }
    }
  return rep;
}

std::vector<TbProbe> tb_probe(const KernelSpec& K, const AccretivePair& pair_b,
                              const AccretivePair& pair_bp) {
  AxisShape s1 = pair_b.b1.shape, s2 = pair_b.b2.shape;
  if (s1.dim != 1 || s2.dim != 1)
    throw std::invalid_argument("tb_probe: one-dimensional axes required");
  double h1 = s1.cell_volume(), h2 = s2.cell_volume();
  AccretivePair unit = unit_pair(s1.depth, s2.depth, 1, 1);

  auto apply = [&](const std::function<Complex(double, double, double, double)>& kernel,
                   const Eigen::MatrixXcd& weight) {
    GridFunction out = GridFunction::zero(s1, s2);
    for (std::int64_t xr = 0; xr < s1.cells(); ++xr) {
      double x1 = (static_cast<double>(xr) + 0.5) * h1;
      for (std::int64_t xc = 0; xc < s2.cells(); ++xc) {
        double x2 = (static_cast<double>(xc) + 0.5) * h2;
        Complex sum{0.0, 0.0};
        for (std::int64_t yr = 0; yr < s1.cells(); ++yr) {
          if (yr == xr) continue;
          double y1 = (static_cast<double>(yr) + 0.5) * h1;
          for (std::int64_t yc = 0; yc < s2.cells(); ++yc) {
            if (yc == xc) continue;
            double y2 = (static_cast<double>(yc) + 0.5) * h2;
            sum += kernel(x1, x2, y1, y2) * weight(yr, yc);
          }
        }
        out.v(xr, xc) = sum * h1 * h2;
      }
    }
    return out;
  };

  auto direct = K.eval;
  auto transpose = [direct](double x1, double x2, double y1, double y2) {
    return direct(y1, y2, x1, x2);
  };
  // Partial adjoint in the first variable: swap the first coordinates of
  // the two arguments.
  auto partial = [direct](double x1, double x2, double y1, double y2) {
    return direct(y1, x2, x1, y2);
  };
  auto partial_transpose = [direct](double x1, double x2, double y1, double y2) {
    return direct(x1, y2, y1, x2);
  };

  Eigen::MatrixXcd wb = pair_b.b1.v * pair_b.b2.v.transpose();
  Eigen::MatrixXcd wbp = pair_bp.b1.v * pair_bp.b2.v.transpose();
  Eigen::MatrixXcd wd = pair_b.b1.v * pair_bp.b2.v.transpose();
  Eigen::MatrixXcd wdp = pair_bp.b1.v * pair_b.b2.v.transpose();

  std::vector<TbProbe> probes;
  probes.push_back({"Tb", apply(direct, wb), 0.0});
  probes.push_back({"T*b'", apply(transpose, wbp), 0.0});
  probes.push_back({"T1d'", apply(partial, wdp), 0.0});
  probes.push_back({"T1*d", apply(partial_transpose, wd), 0.0});
  for (auto& probe : probes) probe.rect_bmo = rect_bmo_norm(probe.probe, unit);
  return probes;
}

}  // namespace bpb
