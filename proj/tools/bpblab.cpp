#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bpb/errors.hpp"
#include "bpb/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bpblab: bi-parameter weighted dyadic harmonic analysis experiments"};

  std::string config_path, suite, depth, dims, weights, kernel, out_dir;
  std::string seed_str, r_str, delta_str, trials_str;
  bool emit = false;
  app.add_option("--config", config_path, "key=value config file (flags override)");
  app.add_option("--suite", suite,
                 "properties|paraproducts|atoms|hardy|goodness|decay|wbp|expansion|tbprobe");
  app.add_option("--depth", depth, "mesh depths, N1xN2");
  app.add_option("--dims", dims, "axis dimensions, NxM");
  app.add_option("--seed", seed_str, "random seed");
  app.add_option("--weights", weights, "one | random:c0,B");
  app.add_option("--kernel", kernel, "product_hilbert | bicommutator");
  app.add_option("--r", r_str, "goodness separation parameter");
  app.add_option("--delta", delta_str, "kernel Holder exponent");
  app.add_option("--trials", trials_str, "number of randomized trials");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--emit-config", emit, "print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : bpb::kExitUsage;
  }

  try {
    bpb::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = bpb::parse_config(config_path);
    if (!suite.empty()) bpb::apply_setting(cfg, "suite", suite);
    if (!depth.empty()) bpb::apply_setting(cfg, "depth", depth);
    if (!dims.empty()) bpb::apply_setting(cfg, "dims", dims);
    if (!seed_str.empty()) bpb::apply_setting(cfg, "seed", seed_str);
    if (!weights.empty()) bpb::apply_setting(cfg, "weights", weights);
    if (!kernel.empty()) bpb::apply_setting(cfg, "kernel", kernel);
    if (!r_str.empty()) bpb::apply_setting(cfg, "r", r_str);
    if (!delta_str.empty()) bpb::apply_setting(cfg, "delta", delta_str);
    if (!trials_str.empty()) bpb::apply_setting(cfg, "trials", trials_str);
    if (!out_dir.empty()) bpb::apply_setting(cfg, "out", out_dir);
    bpb::validate(cfg);
    if (emit) {
      std::cout << bpb::emit_config(cfg);
      return bpb::kExitOk;
    }
    return bpb::run_suite(cfg);
  } catch (const bpb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bpb::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return bpb::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return bpb::kExitNumeric;
  }
}
