// cogrelay: outage experiments for the cognitive relay schemes.
//
//   cogrelay sweep-snr      secondary outage vs primary SNR, all policies
//   cogrelay sweep-rate     secondary outage vs R_p with R_s = R_p/2
//   cogrelay grid-position  secondary outage vs relay position
//   cogrelay validate       analytic formulas against simulation
//
// Exit status: 0 ok, 2 config error, 3 validation failure, 4 output error.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cogrelay/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitOutput = 4;

struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t positions = 0;
  unsigned workers = 0;
  std::string out;
  std::string policy;
};

// File first, then --set, then the dedicated flags.
cogrelay::experiments::ExperimentConfig build_config(const Flags& f, const CLI::App& app) {
  using namespace cogrelay::experiments;
  ExperimentConfig c;
  if (!f.config.empty()) apply_config_file(c, f.config);
  for (const auto& s : f.sets) apply_assignment(c, s);
  if (app.count("--seed")) c.seed = f.seed;
  if (app.count("--trials")) c.trials = f.trials;
  if (app.count("--positions")) c.positions = f.positions;
  if (app.count("--workers")) c.workers = f.workers;
  if (app.count("--out")) c.out = f.out;
  if (app.count("--policy")) c.policies = parse_policy_list(f.policy);
  c.validate();
  return c;
}

// Writes to a temporary buffer first so a failed run leaves no partial file.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  if (path.empty() || path == "-") {
    std::cout << buf.str() << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open output file: " + path);
  out << buf.str();
  out.close();
  if (!out) throw OutputError("failed writing output file: " + path);
}

constexpr const char* kFooter = R"(
Config: flat key=value file (see config/default.cfg); SNRs in dB.
Override any key with --set key=value.

CSV columns
  sweep-snr:     gamma_p_db, policy, outage_sec_mc, outage_sec_ci, outage_sec_bound,
                 outage_pri_mc, freq_d0, freq_d1, freq_d2, freq_d3
  sweep-rate:    rate_p, rate_s, policy, gamma_s, cutoff_rate_p, outage_sec_mc,
                 outage_sec_ci, outage_pri_mc, freq_d0, freq_d1, freq_d2, freq_d3
  grid-position: x, y, valid, outage_sec_mc, outage_sec_ci, outage_pri_mc,
                 dominant_decision, freq_d0, freq_d1, freq_d2, freq_d3
outage_sec_bound is the analytic bound for adaptive1, the exact outage for
direct, 1 when the secondary is silenced and empty otherwise. CI columns
are 95% half-widths.

Policies: direct, primary_only, secondary_only, adaptive1, adaptive2.
--trials is the total per sweep point (split across relay positions) and
the count per cell for grid-position.

Exit status: 0 success, 2 config error, 3 validation failure, 4 output error.)";

}  // namespace

int main(int argc, char** argv) {
  namespace ex = cogrelay::experiments;
  CLI::App app{"Outage experiments for adaptive cognitive relaying"};
  app.footer(kFooter);
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--set", f.sets, "override a config key (key=value), repeatable");
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--trials", f.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app.add_option("--positions", f.positions, "random relay positions to average (0: fixed relay)");
  app.add_option("--workers", f.workers, "worker threads (0: all cores)");
  app.add_option("--out", f.out, "output path (default stdout)");
  app.add_option("--policy", f.policy, "comma-separated policy list");

  auto* snr = app.add_subcommand("sweep-snr", "secondary outage vs primary SNR");
  auto* rate = app.add_subcommand("sweep-rate", "secondary outage vs primary rate");
  auto* grid = app.add_subcommand("grid-position", "secondary outage vs relay position");
  auto* val = app.add_subcommand("validate", "check analytic results against simulation");
  for (auto* sub : {snr, rate, grid, val}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const ex::ExperimentConfig c = build_config(f, app);
    if (*snr) emit(c.out, [&](std::ostream& o) { ex::cmd_sweep_snr(c, o); });
    else if (*rate) emit(c.out, [&](std::ostream& o) { ex::cmd_sweep_rate(c, o); });
    else if (*grid) emit(c.out, [&](std::ostream& o) { ex::cmd_grid_position(c, o); });
    else if (*val) {
      const ex::ValidationReport rep = ex::run_validation(c);
      emit(c.out, [&](std::ostream& o) { ex::write_validation_report(rep, c.seed, o); });
      if (!rep.passed()) {
        std::cerr << "validation failed\n";
        return kExitValidation;
      }
    }
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitOutput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
