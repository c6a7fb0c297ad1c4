#include "bpb/hardy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "bpb/errors.hpp"

namespace bpb {

namespace {

// Plain (unweighted) average of g over each generation-(p,q) rectangle,
// broadcast back to finest cells.
Eigen::ArrayXXd plain_average(const Eigen::ArrayXXd& g, AxisShape s1, AxisShape s2, int p,
                              int q) {
  std::int64_t nb1 = s1.block(p), nb2 = s2.block(q);
  Eigen::ArrayXXd out(g.rows(), g.cols());
  for (std::int64_t i = 0; i < s1.cubes(p); ++i)
    for (std::int64_t j = 0; j < s2.cubes(q); ++j) {
      double m = g.block(i * nb1, j * nb2, nb1, nb2).mean();
      out.block(i * nb1, j * nb2, nb1, nb2).setConstant(m);
    }
  return out;
}

Eigen::MatrixXcd masked(const Eigen::MatrixXcd& m, const Eigen::ArrayXXd& mask) {
  return (m.array() * mask.cast<Complex>()).matrix();
}

}  // namespace

Eigen::ArrayXXd StoppingTime::F() const {
  const Eigen::ArrayXXd& full = mask[static_cast<std::size_t>(shape1.depth)]
                                    [static_cast<std::size_t>(shape2.depth)];
  return 1.0 - full;
}

double StoppingTime::F_measure() const { return F().mean(); }

StoppingTime build_stopping_time(const Eigen::ArrayXXd& F_indicator, AxisShape shape1,
                                 AxisShape shape2) {
  if (F_indicator.rows() != shape1.cells() || F_indicator.cols() != shape2.cells())
    throw std::invalid_argument("build_stopping_time: indicator resolution mismatch");
  StoppingTime tau;
  tau.shape1 = shape1;
  tau.shape2 = shape2;
  int n1 = shape1.depth, n2 = shape2.depth;
  tau.mask.assign(static_cast<std::size_t>(n1 + 1),
                  std::vector<Eigen::ArrayXXd>(static_cast<std::size_t>(n2 + 1)));
  for (int p = 0; p <= n1; ++p)
    for (int q = 0; q <= n2; ++q) {
      Eigen::ArrayXXd m =
          (plain_average(F_indicator, shape1, shape2, p, q) <= 0.5).cast<double>();
      // The membership condition quantifies over all predecessors; the
      // cumulative product along both scale axes enforces it.
      if (p > 0) m *= tau.mask[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(q)];
      if (q > 0) m *= tau.mask[static_cast<std::size_t>(p)][static_cast<std::size_t>(q - 1)];
      tau.mask[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = std::move(m);
    }
  return tau;
}

GridFunction stopped_sum(const MartingaleCoefficients& coeffs, const StoppingTime& tau) {
  GridFunction out = GridFunction::zero(coeffs.shape1, coeffs.shape2);
  for (std::size_t p = 0; p < coeffs.D.size(); ++p)
    for (std::size_t q = 0; q < coeffs.D[p].size(); ++q)
      out.v += masked(coeffs.D[p][q].v, tau.mask[p][q]);
  return out;
}

AtomicDecomposition atomic_decompose(const GridFunction& f, const AccretivePair& pair) {
  GridFunction projected = project_mean_zero(f, pair);
  double drift = (projected.v - f.v).cwiseAbs().maxCoeff();
  if (drift > 1e-10)
    throw std::invalid_argument(
        "atomic_decompose: input has a coarse b-adapted component; apply project_mean_zero first");
  MartingaleCoefficients coeffs = decompose(f, pair);
  GridFunction S = square_function(f, pair);
  Eigen::ArrayXXd Sv = S.v.real().array();

  AtomicDecomposition dec;
  dec.square_l1 = norms(S).l1;
  double smax = Sv.maxCoeff();
  double smin_pos = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < Sv.rows(); ++r)
    for (Eigen::Index c = 0; c < Sv.cols(); ++c)
      if (Sv(r, c) > 1e-13) smin_pos = std::min(smin_pos, Sv(r, c));
  if (!std::isfinite(smin_pos)) return dec;  // square function vanishes: nothing to decompose

  int lo = static_cast<int>(std::floor(std::log2(smin_pos))) - 3;
  int hi = static_cast<int>(std::ceil(std::log2(smax)));
  dec.level_lo = lo;
  dec.level_hi = hi;

  StoppingTime tau_n = build_stopping_time((Sv > std::ldexp(1.0, lo)).cast<double>(),
                                           f.shape1, f.shape2);
  GridFunction ft_n = stopped_sum(coeffs, tau_n);
  for (int n = lo; n <= hi; ++n) {
    StoppingTime tau_next = build_stopping_time(
        (Sv > std::ldexp(1.0, n + 1)).cast<double>(), f.shape1, f.shape2);
    GridFunction ft_next = stopped_sum(coeffs, tau_next);
    double lambda = std::ldexp(1.0, n) * tau_n.F_measure();
    Eigen::MatrixXcd delta = ft_next.v - ft_n.v;
    double dmax = delta.cwiseAbs().maxCoeff();
    if (lambda > 0.0 && dmax > 1e-14) {
      Atom atom;
      atom.a = GridFunction{f.shape1, f.shape2, delta / lambda};
      atom.tau = tau_n;
      atom.level = n;
      atom.lambda = lambda;
      dec.sum_abs_lambda += std::abs(lambda);
      dec.atoms.push_back(std::move(atom));
    }
    tau_n = std::move(tau_next);
    ft_n = std::move(ft_next);
  }
  return dec;
}

AtomCertificate verify_atom(const Atom& atom, const AccretivePair& pair, double tol) {
  AtomCertificate cert;
  const StoppingTime& tau = atom.tau;
  cert.f_measure = tau.F_measure();
  cert.nontrivial = cert.f_measure < 1.0 - 1e-15;

  int n1 = atom.a.shape1.depth, n2 = atom.a.shape2.depth;
  double resid = 0.0;
  for (int p = 0; p < n1; ++p) {
    GridFunction ep = expect(atom.a, pair.b1, 1, p);
    for (int q = 0; q < n2; ++q) {
      GridFunction epq = expect(ep, pair.b2, 2, q);
      const Eigen::ArrayXXd& next =
          tau.mask[static_cast<std::size_t>(p + 1)][static_cast<std::size_t>(q + 1)];
      resid = std::max(resid, masked(epq.v, next).cwiseAbs().maxCoeff());
    }
  }
  cert.property2_residual = resid;

  GridFunction maximal = maximal_function(atom.a, pair);
  GridFunction square = square_function(atom.a, pair);
  Eigen::ArrayXXd off = 1.0 - tau.F();
  cert.support_residual =
      std::max(masked(maximal.v, off).cwiseAbs().maxCoeff(),
               masked(square.v, off).cwiseAbs().maxCoeff());
  cert.maximal_l2 = norms(maximal).l2;
  cert.atom_constant = cert.maximal_l2 * std::sqrt(cert.f_measure);
  cert.passed = cert.property2_residual <= tol && cert.support_residual <= tol;
  return cert;
}

H1Report h1_report(const GridFunction& f, const AccretivePair& pair) {
  H1Report rep;
  rep.maximal_l1 = norms(maximal_function(f, pair)).l1;
  rep.square_l1 = norms(square_function(f, pair)).l1;
  if (rep.square_l1 > 0.0) {
    rep.ratio = rep.maximal_l1 / rep.square_l1;
    rep.ratio_defined = true;
  }
  return rep;
}

std::string to_json(const AtomicDecomposition& dec, const AccretivePair& pair) {
  nlohmann::json j;
  nlohmann::json levels = nlohmann::json::array();
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& atom : dec.atoms) {
    Eigen::ArrayXXd F = atom.tau.F();
    std::vector<int> cells;
    for (Eigen::Index r = 0; r < F.rows(); ++r)
      for (Eigen::Index c = 0; c < F.cols(); ++c)
        if (F(r, c) > 0.5) cells.push_back(static_cast<int>(r * F.cols() + c));
    levels.push_back({{"n", atom.level},
                      {"lambda", atom.lambda},
                      {"atom_function", nlohmann::json::parse(to_json(atom.a))},
                      {"F_cells", cells}});
    AtomCertificate cert = verify_atom(atom, pair);
    certs.push_back({{"n", atom.level},
                     {"nontrivial", cert.nontrivial},
                     {"property2_residual", cert.property2_residual},
                     {"support_residual", cert.support_residual},
                     {"atom_constant", cert.atom_constant},
                     {"passed", cert.passed}});
  }
  j["levels"] = levels;
  j["certificates"] = certs;
  j["sum_abs_lambda"] = dec.sum_abs_lambda;
  j["square_l1"] = dec.square_l1;
  return j.dump();
}

}  // namespace bpb
