#include "bpb/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "bpb/accretive.hpp"
#include "bpb/dyadic.hpp"
#include "bpb/errors.hpp"
#include "bpb/grid_function.hpp"
#include "bpb/hardy.hpp"
#include "bpb/martingale.hpp"
#include "bpb/operator_lab.hpp"
#include "bpb/paraproduct.hpp"

namespace bpb {

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string> kSuites = {"properties", "paraproducts", "atoms",
                                          "hardy",      "goodness",     "decay",
                                          "wbp",        "expansion",    "tbprobe"};

bool parse_weights(const std::string& w, double& c0, double& B) {
  if (w == "one") {
    c0 = 1.0;
    B = 1.0;
    return true;
  }
  if (w.rfind("random:", 0) == 0) {
    return std::sscanf(w.c_str() + 7, "%lf,%lf", &c0, &B) == 2 && c0 > 0.0 && c0 < 1.0 &&
           B >= 1.0;
  }
  return false;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  auto bad = [&](const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
  };
  if (key == "suite") {
    cfg.suite = value;
  } else if (key == "depth") {
    if (std::sscanf(value.c_str(), "%dx%d", &cfg.depth1, &cfg.depth2) != 2)
      bad("expected N1xN2");
  } else if (key == "dims") {
    if (std::sscanf(value.c_str(), "%dx%d", &cfg.dim1, &cfg.dim2) != 2) bad("expected NxM");
  } else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (...) {
      bad("expected an unsigned integer");
    }
  } else if (key == "weights") {
    cfg.weights = value;
  } else if (key == "kernel") {
    cfg.kernel = value;
  } else if (key == "r") {
    try {
      cfg.r = std::stoi(value);
    } catch (...) {
      bad("expected an integer");
    }
  } else if (key == "delta") {
    try {
      cfg.delta = std::stod(value);
    } catch (...) {
      bad("expected a real number");
    }
  } else if (key == "trials") {
    try {
      cfg.trials = std::stoi(value);
    } catch (...) {
      bad("expected an integer");
    }
  } else if (key == "out") {
    cfg.out_dir = value;
  } else {
    throw ConfigError("unknown config key '" + key +
                      "'; valid keys: suite, depth, dims, seed, weights, kernel, r, delta, "
                      "trials, out");
  }
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      s = a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    trim(key);
    trim(value);
    apply_setting(cfg, key, value);
  }
  return cfg;
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "suite=" << cfg.suite << "\n";
  os << "depth=" << cfg.depth1 << "x" << cfg.depth2 << "\n";
  os << "dims=" << cfg.dim1 << "x" << cfg.dim2 << "\n";
  os << "seed=" << cfg.seed << "\n";
  os << "weights=" << cfg.weights << "\n";
  os << "kernel=" << cfg.kernel << "\n";
  os << "r=" << cfg.r << "\n";
  os << "delta=" << cfg.delta << "\n";
  os << "trials=" << cfg.trials << "\n";
  os << "out=" << cfg.out_dir << "\n";
  return os.str();
}

void validate(const ExperimentConfig& cfg) {
  if (std::find(kSuites.begin(), kSuites.end(), cfg.suite) == kSuites.end())
    throw ConfigError("unknown suite '" + cfg.suite + "'");
  if (cfg.depth1 < 1 || cfg.depth2 < 1 || cfg.depth1 > 8 || cfg.depth2 > 8)
    throw ConfigError("depth out of range: each axis must be in 1..8");
  if (cfg.suite == "expansion" && (cfg.depth1 > 4 || cfg.depth2 > 4))
    throw ConfigError("expansion suite limited to depth 4 per axis");
  if ((cfg.dim1 != 1 && cfg.dim1 != 2) || (cfg.dim2 != 1 && cfg.dim2 != 2))
    throw ConfigError("dims out of range: each axis dimension must be 1 or 2");
  bool needs_dim1 = cfg.suite == "decay" || cfg.suite == "wbp" || cfg.suite == "expansion" ||
                    cfg.suite == "tbprobe";
  if (needs_dim1 && (cfg.dim1 != 1 || cfg.dim2 != 1))
    throw ConfigError("suite '" + cfg.suite + "' requires dims 1x1");
  double c0, B;
  if (!parse_weights(cfg.weights, c0, B))
    throw ConfigError("weights must be 'one' or 'random:c0,B' with 0<c0<1<=B");
  if (cfg.kernel != "product_hilbert" && cfg.kernel != "bicommutator")
    throw ConfigError("unknown kernel '" + cfg.kernel + "'");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.r < 1) throw ConfigError("r must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw ConfigError("delta must be in (0,1]");
}

namespace {

AccretivePair make_pair(const ExperimentConfig& cfg, std::uint64_t seed) {
  double c0, B;
  parse_weights(cfg.weights, c0, B);
  if (cfg.weights == "one") return unit_pair(cfg.depth1, cfg.depth2, cfg.dim1, cfg.dim2);
  return random_pair(seed, cfg.depth1, cfg.depth2, cfg.dim1, cfg.dim2, c0, B);
}

GridFunction random_grid(std::mt19937_64& rng, AxisShape s1, AxisShape s2) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  GridFunction f = GridFunction::zero(s1, s2);
  for (Eigen::Index r = 0; r < f.v.rows(); ++r)
    for (Eigen::Index c = 0; c < f.v.cols(); ++c) f.v(r, c) = Complex(gauss(rng), gauss(rng));
  return f;
}

struct SuiteResult {
  nlohmann::json metrics;
  nlohmann::json pass;
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
  bool all_pass = true;

  void check(const std::string& name, bool ok) {
    pass[name] = ok;
    all_pass = all_pass && ok;
  }
};

SuiteResult run_properties(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AxisShape s1{cfg.depth1, cfg.dim1}, s2{cfg.depth2, cfg.dim2};
  double recon = 0.0, cancel = 0.0, ortho = 0.0, constancy = 0.0, intertwine = 0.0,
         semigroup = 0.0, parseval = 0.0;
  std::ostringstream detail;
  detail << "trial,reconstruction,cancellation,orthogonality,intertwining\n";
  for (int t = 0; t < cfg.trials; ++t) {
    AccretivePair pair = make_pair(cfg, rng());
    GridFunction f = random_grid(rng, s1, s2);
    MartingaleCoefficients coeffs = decompose(f, pair);
    double tr = (reconstruct(coeffs).v - f.v).cwiseAbs().maxCoeff();
    recon = std::max(recon, tr);

    if (cfg.weights == "one") {
      double total = coeffs.corner.v.cwiseAbs2().sum();
      for (const auto& r : coeffs.row) total += r.v.cwiseAbs2().sum();
      for (const auto& c : coeffs.col) total += c.v.cwiseAbs2().sum();
      for (const auto& rowD : coeffs.D)
        for (const auto& d : rowD) total += d.v.cwiseAbs2().sum();
      double fn = f.v.cwiseAbs2().sum();
      parseval = std::max(parseval, std::abs(total - fn) / fn);
    }

    double tc = 0.0;
    for (int p = 0; p < cfg.depth1; ++p) {
      GridFunction d = diff(f, pair.b1, 1, p);
      Eigen::MatrixXcd m = d.v.array().colwise() * pair.b1.v.array();
      std::int64_t nb = s1.block(p);
      for (std::int64_t k = 0; k < s1.cubes(p); ++k)
        tc = std::max(tc,
                      (m.middleRows(k * nb, nb).colwise().sum() * s1.cell_volume())
                          .cwiseAbs()
                          .maxCoeff());
    }
    cancel = std::max(cancel, tc);

    int p0 = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.depth1));
    int q0 = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.depth2));
    int p1 = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.depth1));
    int q1 = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.depth2));
    GridFunction dd = double_diff(f, pair, p0, q0);
    GridFunction ddd = double_diff(dd, pair, p1, q1);
    double to;
    if (p0 == p1 && q0 == q1)
      to = (ddd.v - dd.v).cwiseAbs().maxCoeff();
    else
      to = ddd.v.cwiseAbs().maxCoeff();
    ortho = std::max(ortho, to);

    // Constancy of double differences on the child rectangles.
    std::int64_t cb1 = s1.block(std::min(p0 + 1, cfg.depth1));
    std::int64_t cb2 = s2.block(std::min(q0 + 1, cfg.depth2));
    for (std::int64_t i = 0; i < s1.cells() / cb1; ++i)
      for (std::int64_t j = 0; j < s2.cells() / cb2; ++j) {
        auto blk = dd.v.block(i * cb1, j * cb2, cb1, cb2);
        constancy = std::max(constancy, (blk.array() - blk(0, 0)).abs().maxCoeff());
      }

    GridFunction fn{s1, s2, f.v / std::sqrt(f.v.cwiseAbs2().sum() * f.cell_volume())};
    GridFunction btensor = tensor(pair.b1, pair.b2);
    GridFunction lhs{s1, s2, btensor.v.cwiseProduct(double_diff(fn, pair, p0, q0).v)};
    GridFunction mbf{s1, s2, btensor.v.cwiseProduct(fn.v)};
    GridFunction rhs = adjoint_diff(mbf, pair, p0, q0);
    double ti = (lhs.v - rhs.v).cwiseAbs().maxCoeff();
    intertwine = std::max(intertwine, ti);

    GridFunction e1 = expect(expect(f, pair.b1, 1, p0), pair.b1, 1, p1);
    GridFunction e2 = expect(f, pair.b1, 1, std::min(p0, p1));
    semigroup = std::max(semigroup, (e1.v - e2.v).cwiseAbs().maxCoeff());

    char row[160];
    std::snprintf(row, sizeof(row), "%d,%.3e,%.3e,%.3e,%.3e\n", t, tr, tc, to, ti);
    detail << row;
  }
  res.metrics["reconstruction_max"] = recon;
  res.metrics["cancellation_max"] = cancel;
  res.metrics["orthogonality_max"] = ortho;
  res.metrics["constancy_max"] = constancy;
  res.metrics["intertwining_max"] = intertwine;
  res.metrics["semigroup_max"] = semigroup;
  if (cfg.weights == "one") res.metrics["parseval_rel_max"] = parseval;
  res.check("reconstruction", recon <= 1e-10);
  res.check("cancellation", cancel <= 1e-10);
  res.check("orthogonality", ortho <= 1e-10);
  res.check("constancy", constancy <= 1e-12);
  res.check("intertwining", intertwine <= 1e-12);
  res.check("semigroup", semigroup <= 1e-12);
  if (cfg.weights == "one") res.check("parseval", parseval <= 1e-9);
  res.files.emplace_back("properties_detail.csv", detail.str());
  return res;
}

SuiteResult run_paraproducts(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AxisShape s1{cfg.depth1, cfg.dim1}, s2{cfg.depth2, cfg.dim2};
  AccretivePair pair_avg = make_pair(cfg, rng());
  AccretivePair pair_diff = make_pair(cfg, rng());

  // Symbol with sup-norm at most 1.
  GridFunction a = random_grid(rng, s1, s2);
  a.v /= a.v.cwiseAbs().maxCoeff();
  AxisFunction a2{s2, a.v.row(0).transpose()};

  // Partial paraproduct on the second axis, lifted to a one-row mesh so the
  // shared power iteration applies.
  AxisShape row_shape{0, 1};
  GridMap partial_map = [&](const GridFunction& f) {
    AxisFunction fx{s2, f.v.row(0).transpose()};
    AxisFunction out = partial_paraproduct(a2, fx, pair_avg.b2, pair_diff.b2);
    return GridFunction{row_shape, s2, out.v.transpose()};
  };
  GridMap partial_adj = [&](const GridFunction& g) {
    AxisFunction gx{s2, g.v.row(0).transpose()};
    AxisFunction out = partial_paraproduct_herm_adjoint(a2, gx, pair_avg.b2, pair_diff.b2);
    return GridFunction{row_shape, s2, out.v.transpose()};
  };
  NormEstimate partial_norm =
      operator_norm_estimate(partial_map, partial_adj, row_shape, s2, 8, 100, rng());

  GridMap full_map = [&](const GridFunction& f) {
    return full_paraproduct(a, f, pair_avg, pair_diff);
  };
  GridMap full_adj = [&](const GridFunction& g) {
    return full_paraproduct_herm_adjoint(a, g, pair_avg, pair_diff);
  };
  NormEstimate full_norm = operator_norm_estimate(full_map, full_adj, s1, s2, 8, 100, rng());

  GridMap mixed_map = [&](const GridFunction& f) {
    return mixed_paraproduct(a, f, pair_avg, pair_diff);
  };
  GridMap mixed_adj = [&](const GridFunction& g) {
    return mixed_paraproduct_herm_adjoint(a, g, pair_avg, pair_diff);
  };
  NormEstimate mixed_norm = operator_norm_estimate(mixed_map, mixed_adj, s1, s2, 8, 100, rng());

  // Constant symbol annihilates all three paraproducts.
  AxisFunction ones2 = AxisFunction::constant(s2, 1.0);
  AxisFunction fprobe{s2, random_grid(rng, row_shape, s2).v.row(0).transpose()};
  double annih =
      partial_paraproduct(ones2, fprobe, pair_avg.b2, pair_diff.b2).v.cwiseAbs().maxCoeff();

  // Carleson constant of the symbol's difference masses against its BMO norm.
  CarlesonSequence seq = diff_mass_sequence(a2, pair_diff.b2);
  double carleson = carleson_constant(seq);
  double bmo = bmo_norm_1p(a2);
  double link = bmo > 0.0 ? carleson / (bmo * bmo) : 0.0;

  // Carleson embedding with the classical Doob constant 4.
  double embed_max = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    AxisFunction f = AxisFunction::zero(s2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < f.v.size(); ++i) f.v(i) = unif(rng);
    CarlesonSequence c = CarlesonSequence::zero(s2);
    for (auto& level : c.c)
      for (auto& x : level) x = unif(rng);
    double lhs = 0.0;
    for (int p = 0; p <= s2.depth; ++p) {
      std::int64_t nb = s2.block(p);
      for (std::int64_t k = 0; k < s2.cubes(p); ++k) {
        double avg = f.v.segment(k * nb, nb).real().mean();
        lhs += avg * avg * c.c[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
      }
    }
    double rhs = 4.0 * carleson_constant(c) * f.v.cwiseAbs2().sum() * s2.cell_volume();
    if (rhs > 0.0) embed_max = std::max(embed_max, lhs / rhs);
  }

  res.metrics["partial_norm"] = partial_norm.value;
  res.metrics["partial_gap"] = partial_norm.gap;
  res.metrics["full_norm"] = full_norm.value;
  res.metrics["full_gap"] = full_norm.gap;
  res.metrics["mixed_norm"] = mixed_norm.value;
  res.metrics["mixed_gap"] = mixed_norm.gap;
  res.metrics["annihilation_max"] = annih;
  res.metrics["carleson_constant"] = carleson;
  res.metrics["bmo_norm"] = bmo;
  res.metrics["carleson_bmo_ratio"] = link;
  res.metrics["embedding_ratio_max"] = embed_max;
  res.check("annihilation", annih == 0.0);
  res.check("embedding", embed_max <= 1.0 + 1e-12);
  res.check("norms_finite", std::isfinite(partial_norm.value) &&
                                std::isfinite(full_norm.value) &&
                                std::isfinite(mixed_norm.value));
  std::ostringstream detail;
  detail << "operator,norm,gap\n";
  detail << "partial," << partial_norm.value << "," << partial_norm.gap << "\n";
  detail << "full," << full_norm.value << "," << full_norm.gap << "\n";
  detail << "mixed," << mixed_norm.value << "," << mixed_norm.gap << "\n";
  res.files.emplace_back("paraproducts_detail.csv", detail.str());
  return res;
}

SuiteResult run_atoms(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AxisShape s1{cfg.depth1, cfg.dim1}, s2{cfg.depth2, cfg.dim2};
  double recon_max = 0.0, lambda_ratio_max = 0.0;
  int atoms_total = 0, atoms_failed = 0;
  bool monotone_ok = true, chebyshev_ok = true;
  std::ostringstream detail;
  detail << "trial,levels,reconstruction,lambda_ratio\n";
  for (int t = 0; t < cfg.trials; ++t) {
    AccretivePair pair = make_pair(cfg, rng());
    GridFunction f = project_mean_zero(random_grid(rng, s1, s2), pair);
    AtomicDecomposition dec = atomic_decompose(f, pair);
    GridFunction sum = GridFunction::zero(s1, s2);
    for (const Atom& atom : dec.atoms) sum.v += atom.lambda * atom.a.v;
    double tr = (sum.v - f.v).cwiseAbs().maxCoeff();
    recon_max = std::max(recon_max, tr);
    double ratio = dec.square_l1 > 0.0 ? dec.sum_abs_lambda / dec.square_l1 : 0.0;
    lambda_ratio_max = std::max(lambda_ratio_max, ratio);

    GridFunction S = square_function(f, pair);
    Eigen::ArrayXXd Sv = S.v.real().array();
    for (const Atom& atom : dec.atoms) {
      ++atoms_total;
      if (!verify_atom(atom, pair).passed) ++atoms_failed;
      double fn = (Sv > std::ldexp(1.0, atom.level)).cast<double>().mean();
      if (fn > std::ldexp(1.0, -atom.level) * dec.square_l1 + 1e-12) chebyshev_ok = false;
    }
    for (std::size_t i = 1; i < dec.atoms.size(); ++i) {
      const StoppingTime& prev = dec.atoms[i - 1].tau;
      const StoppingTime& next = dec.atoms[i].tau;
      for (std::size_t p = 0; p < prev.mask.size() && monotone_ok; ++p)
        for (std::size_t q = 0; q < prev.mask[p].size() && monotone_ok; ++q)
          if ((prev.mask[p][q] > next.mask[p][q] + 0.5).any()) monotone_ok = false;
    }
    char row[128];
    std::snprintf(row, sizeof(row), "%d,%zu,%.3e,%.4f\n", t, dec.atoms.size(), tr, ratio);
    detail << row;
  }
  res.metrics["reconstruction_max"] = recon_max;
  res.metrics["atoms_total"] = atoms_total;
  res.metrics["atoms_failed"] = atoms_failed;
  res.metrics["lambda_ratio_max"] = lambda_ratio_max;
  res.metrics["monotone_ok"] = monotone_ok;
  res.metrics["chebyshev_ok"] = chebyshev_ok;
  res.check("reconstruction", recon_max <= 1e-9);
  res.check("atoms_certified", atoms_failed == 0);
  res.check("monotone_stopping_times", monotone_ok);
  res.check("chebyshev", chebyshev_ok);
  res.check("lambda_l1", lambda_ratio_max <= 128.0);
  res.files.emplace_back("atoms_detail.csv", detail.str());
  return res;
}

SuiteResult run_hardy(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AxisShape s1{cfg.depth1, cfg.dim1}, s2{cfg.depth2, cfg.dim2};
  double ratio_max = 0.0;
  double ratio_min = std::numeric_limits<double>::infinity();
  std::ostringstream detail;
  detail << "trial,maximal_l1,square_l1,ratio\n";
  for (int t = 0; t < cfg.trials; ++t) {
    AccretivePair pair = make_pair(cfg, rng());
    GridFunction f = project_mean_zero(random_grid(rng, s1, s2), pair);
    H1Report rep = h1_report(f, pair);
    if (rep.ratio_defined) {
      ratio_max = std::max(ratio_max, rep.ratio);
      ratio_min = std::min(ratio_min, rep.ratio);
    }
    char row[128];
    std::snprintf(row, sizeof(row), "%d,%.6e,%.6e,%.4f\n", t, rep.maximal_l1, rep.square_l1,
                  rep.ratio);
    detail << row;
  }
  res.metrics["ratio_max"] = ratio_max;
  res.metrics["ratio_min"] = std::isfinite(ratio_min) ? ratio_min : 0.0;
  res.check("ratios_finite", std::isfinite(ratio_max));
  res.files.emplace_back("hardy_detail.csv", detail.str());
  return res;
}

SuiteResult run_goodness(const ExperimentConfig& cfg) {
  SuiteResult res;
  GoodnessParams params{cfg.r, cfg.delta, cfg.dim1};
  int depth = cfg.depth1;
  int scale = depth;
  bool exhaustive_ok = params.dim * depth <= 20;

  GoodnessEstimate mc = goodness_probability(params, depth, scale, GoodnessMode::MonteCarlo,
                                             std::max(1000, cfg.trials * 100), cfg.seed);
  res.metrics["pi_mc"] = mc.probability;
  res.metrics["pi_mc_stderr"] = mc.std_error;
  if (exhaustive_ok) {
    GoodnessEstimate ex =
        goodness_probability(params, depth, scale, GoodnessMode::Exhaustive, 0, 0);
    res.metrics["pi_exhaustive"] = ex.probability;
    double tol = std::max(3.0 * mc.std_error, 1e-12);
    res.check("mc_agrees", std::abs(ex.probability - mc.probability) <= tol);
    bool monotone = true;
    double prev = -1.0;
    std::ostringstream detail;
    detail << "r,pi_good\n";
    for (int r = 1; r <= depth; ++r) {
      GoodnessParams pr{r, cfg.delta, cfg.dim1};
      GoodnessEstimate er = goodness_probability(pr, depth, scale, GoodnessMode::Exhaustive, 0, 0);
      if (er.probability < prev - 1e-15) monotone = false;
      prev = er.probability;
      detail << r << "," << er.probability << "\n";
    }
    res.metrics["monotone_in_r"] = monotone;
    res.check("monotone_in_r", monotone);
    res.files.emplace_back("goodness_detail.csv", detail.str());
  }
  return res;
}

SuiteResult run_decay(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AccretivePair pair_b = make_pair(cfg, rng());
  AccretivePair pair_bp = make_pair(cfg, rng());
  GoodnessParams params{cfg.r, cfg.delta, 1};
  KernelSpec K = builtin_kernel(cfg.kernel);
  DecayScan scan = decay_scan(K, pair_b, pair_bp, params, cfg.depth1);
  res.metrics["slope_i"] = scan.slope_i;
  res.metrics["slope_j"] = scan.slope_j;
  res.metrics["slopes_defined"] = scan.slopes_defined;
  double threshold = -cfg.delta / 2.0 + 0.1;
  res.check("slopes_defined", scan.slopes_defined);
  res.check("decay_i", scan.slopes_defined && scan.slope_i <= threshold);
  res.check("decay_j", scan.slopes_defined && scan.slope_j <= threshold);
  res.files.emplace_back("decay_scan.csv", to_csv(scan));
  return res;
}

SuiteResult run_wbp(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AccretivePair pair_b = make_pair(cfg, rng());
  AccretivePair pair_bp = make_pair(cfg, rng());
  KernelSpec K = builtin_kernel(cfg.kernel);
  WbpReport rep = wbp_scan(K, pair_b, pair_bp, cfg.depth1, cfg.depth2);
  res.metrics["sup"] = rep.sup;
  res.metrics["witness_p"] = rep.witness_p;
  res.metrics["witness_q"] = rep.witness_q;
  res.metrics["witness_i"] = rep.witness_i;
  res.metrics["witness_j"] = rep.witness_j;
  if (K.antisym1 && K.antisym2 && cfg.weights == "one")
    res.check("antisymmetric_zero", rep.sup <= 1e-12);
  res.check("finite", std::isfinite(rep.sup));
  std::ostringstream detail;
  detail << "sup,witness_p,witness_q,witness_i,witness_j\n";
  detail << rep.sup << "," << rep.witness_p << "," << rep.witness_q << "," << rep.witness_i
         << "," << rep.witness_j << "\n";
  res.files.emplace_back("wbp_detail.csv", detail.str());
  return res;
}

SuiteResult run_expansion(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AxisShape s1{cfg.depth1, 1}, s2{cfg.depth2, 1};
  KernelSpec K = builtin_kernel(cfg.kernel);
  double gap_max = 0.0;
  std::ostringstream detail;
  detail << "trial,lhs_abs,gap\n";
  for (int t = 0; t < cfg.trials; ++t) {
    AccretivePair pair_b = make_pair(cfg, rng());
    AccretivePair pair_bp = make_pair(cfg, rng());
    GridFunction f = random_grid(rng, s1, s2);
    GridFunction g = random_grid(rng, s1, s2);
    ExpansionReport rep = expansion_check(K, f, g, pair_b, pair_bp);
    gap_max = std::max(gap_max, rep.gap);
    char row[96];
    std::snprintf(row, sizeof(row), "%d,%.6e,%.3e\n", t, std::abs(rep.lhs), rep.gap);
    detail << row;
  }
  res.metrics["gap_max"] = gap_max;
  res.check("expansion_complete", gap_max <= 1e-8);
  res.files.emplace_back("expansion_detail.csv", detail.str());
  return res;
}

SuiteResult run_tbprobe(const ExperimentConfig& cfg) {
  SuiteResult res;
  std::mt19937_64 rng(cfg.seed);
  AccretivePair pair_b = make_pair(cfg, rng());
  AccretivePair pair_bp = make_pair(cfg, rng());
  KernelSpec K = builtin_kernel(cfg.kernel);
  std::vector<TbProbe> probes = tb_probe(K, pair_b, pair_bp);
  const char* filenames[4] = {"probe_Tb.json", "probe_Tstar_bprime.json", "probe_T1_dprime.json",
                              "probe_T1star_d.json"};
  bool finite = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    res.metrics["rect_bmo_" + std::to_string(i)] = probes[i].rect_bmo;
    finite = finite && std::isfinite(probes[i].rect_bmo);
    res.files.emplace_back(filenames[i], to_json(probes[i].probe));
  }
  res.check("norms_finite", finite);
  return res;
}

}  // namespace

int run_suite(const ExperimentConfig& cfg) {
  validate(cfg);
  SuiteResult res;
  if (cfg.suite == "properties")
    res = run_properties(cfg);
  else if (cfg.suite == "paraproducts")
    res = run_paraproducts(cfg);
  else if (cfg.suite == "atoms")
    res = run_atoms(cfg);
  else if (cfg.suite == "hardy")
    res = run_hardy(cfg);
  else if (cfg.suite == "goodness")
    res = run_goodness(cfg);
  else if (cfg.suite == "decay")
    res = run_decay(cfg);
  else if (cfg.suite == "wbp")
    res = run_wbp(cfg);
  else if (cfg.suite == "expansion")
    res = run_expansion(cfg);
  else
    res = run_tbprobe(cfg);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  nlohmann::json summary;
  summary["suite"] = cfg.suite;
  summary["config"] = {{"suite", cfg.suite},
                       {"depth", {cfg.depth1, cfg.depth2}},
                       {"dims", {cfg.dim1, cfg.dim2}},
                       {"seed", cfg.seed},
                       {"weights", cfg.weights},
                       {"kernel", cfg.kernel},
                       {"r", cfg.r},
                       {"delta", cfg.delta},
                       {"trials", cfg.trials}};
  summary["metrics"] = res.metrics;
  summary["pass"] = res.pass;
  summary["all_pass"] = res.all_pass;
  summary["version"] = kVersion;
  summary["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  {
    std::ofstream out(fs::path(cfg.out_dir) / "summary.json");
    out << summary.dump(2) << "\n";
  }
  for (const auto& [name, contents] : res.files) {
    std::ofstream out(fs::path(cfg.out_dir) / name);
    out << contents;
  }
  return res.all_pass ? kExitOk : 1;
}

}  // namespace bpb
