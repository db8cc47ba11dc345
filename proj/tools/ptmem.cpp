// ptmem: spectrum / simulate / sweep front end.
//
// Exit codes: 0 success (divergent runs included), 2 config error, 3 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptmem/circuit.hpp"
#include "ptmem/config.hpp"
#include "ptmem/scenario.hpp"
#include "ptmem/sweep.hpp"

namespace fs = std::filesystem;
using namespace ptmem;

namespace {

constexpr int kOutputSchema = 1;

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::optional<double> dt, t_end, tau;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "scenario file")->required();
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--dt", a.dt, "time step in units of T0");
  cmd->add_option("--t-end", a.t_end, "run length in units of T0");
  cmd->add_option("--tau", a.tau, "amplification window in units of T0");
  cmd->add_option("--set", a.sets, "override, e.g. --set memristor.eta=-1");
}

ScenarioConfig effective_config(const CommonArgs& a) {
  ScenarioConfig cfg = load_config(a.config);
  for (const auto& s : a.sets) apply_override(cfg, s);
  if (a.dt) cfg.dt = *a.dt;
  if (a.tau) cfg.tau = *a.tau;
  if (a.t_end) cfg.t_end = *a.t_end;
  cfg.validate();
  return cfg;
}

std::vector<std::string> preamble(const ScenarioConfig& cfg) {
  std::vector<std::string> lines = {"schema=" + std::to_string(kOutputSchema), "config_hash=" + cfg.hash()};
  std::istringstream ini(cfg.to_ini());
  for (std::string line; std::getline(ini, line);) lines.push_back("config " + line);
  return lines;
}

fs::path prepare_out(const std::string& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir) / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  return out;
}

void close_out(std::ofstream& out, const fs::path& p) {
  out.close();
  if (!out) throw IoError("write failed for '" + p.string() + "'");
}

int cmd_spectrum(const CommonArgs& a) {
  const ScenarioConfig cfg = effective_config(a);
  if (cfg.variant != VariantKind::Static) throw ConfigError("spectrum requires model.variant = static");
  const double g_pt = gamma_pt(cfg.mu);
  const fs::path path = prepare_out(a.out, "spectrum.csv");
  auto out = open_out(path);
  for (const auto& l : preamble(cfg)) out << "# " << l << '\n';
  out << "gamma_rel,Gamma,re_e1,re_e2,re_e3,re_e4,im_e1,im_e2,im_e3,im_e4,pt_phase\n";
  const std::size_t n = cfg.spectrum_count;
  for (std::size_t k = 0; k < n; ++k) {
    const double rel = k + 1 == n ? cfg.spectrum_gamma_rel_max
                                  : cfg.spectrum_gamma_rel_min + static_cast<double>(k) *
                                                                     (cfg.spectrum_gamma_rel_max - cfg.spectrum_gamma_rel_min) /
                                                                     static_cast<double>(n - 1);
    const double Gamma = rel * g_pt;
    const SpectrumResult s = eigenvalues_closed_form(cfg.mu, Gamma);
    out << format_double(rel) << ',' << format_double(Gamma);
    for (int e = 0; e < 4; ++e) out << ',' << format_double(s.eigenvalues[e].real());
    for (int e = 0; e < 4; ++e) out << ',' << format_double(s.eigenvalues[e].imag());
    out << ',' << to_string(s.pt_phase) << '\n';
  }
  close_out(out, path);
  std::cout << "wrote " << path.string() << " (" << n << " rows)\n";
  return 0;
}

int cmd_simulate(const CommonArgs& a) {
  const ScenarioConfig cfg = effective_config(a);
  const ScenarioOutcome o = run_scenario(cfg);
  const Trajectory& tr = o.trajectory;

  const fs::path csv = prepare_out(a.out, "trajectory.csv");
  auto out = open_out(csv);
  write_trajectory_csv(out, tr, preamble(cfg));
  close_out(out, csv);

  nlohmann::ordered_json j;
  j["schema"] = kOutputSchema;
  j["config_hash"] = cfg.hash();
  j["lambda_amp"] = o.phase.lambda_amp;
  j["phase"] = to_string(o.phase.label);
  j["tau_used"] = o.phase.tau_used;
  j["threshold"] = cfg.threshold;
  j["diverged"] = tr.diverged;
  j["overflow"] = o.overflow;
  j["t_last"] = tr.times.empty() ? 0.0 : tr.times.back();
  j["steps"] = tr.steps;
  j["samples"] = tr.size();
  if (tr.has_memory() && !tr.gamma_avg.empty()) {
    j["final_gamma_avg"] = tr.gamma_avg.back();
    if (cfg.variant == VariantKind::Memristive) j["final_gamma_avg_rel"] = tr.gamma_avg.back() / gamma_pt(cfg.mu);
    j["final_memory"] = tr.memory.back();
  } else {
    j["final_gamma_avg"] = nullptr;
  }
  j["config"] = cfg.to_ini();

  const fs::path summary = prepare_out(a.out, "summary.json");
  auto js = open_out(summary);
  js << j.dump(2) << '\n';
  close_out(js, summary);

  std::cout << "phase=" << to_string(o.phase.label) << " lambda_amp=" << format_double(o.phase.lambda_amp)
            << (tr.diverged ? " (diverged)" : "") << "\nwrote " << csv.string() << ", " << summary.string() << '\n';
  return 0;
}

int cmd_sweep(const CommonArgs& a, unsigned parallel) {
  const ScenarioConfig cfg = effective_config(a);
  const SweepSpec spec = SweepSpec::from_config(cfg);
  const SweepResult r = run_sweep(spec, parallel);
  const fs::path path = prepare_out(a.out, "sweep.csv");
  write_sweep(r, path.string());
  std::size_t broken = 0, failed = 0;
  for (const auto& c : r.grid) {
    if (c.failure) ++failed;
    else if (c.phase == PhaseKind::PTBroken) ++broken;
  }
  std::cout << r.grid.size() << " cells, " << broken << " PTBroken, " << failed << " failed, "
            << format_double(r.wall_seconds) << " s on " << parallel << " worker(s)\nwrote " << path.string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PT-symmetric LC dimers with memory: spectra, trajectories and phase maps"};
  app.require_subcommand(1);

  CommonArgs spectrum_args, simulate_args, sweep_args;
  unsigned parallel = 1;
  auto* spectrum = app.add_subcommand("spectrum", "closed-form eigenvalue flow over a gamma range");
  add_common(spectrum, spectrum_args);
  auto* simulate = app.add_subcommand("simulate", "integrate one scenario; trajectory CSV + summary JSON");
  add_common(simulate, simulate_args);
  auto* sweep = app.add_subcommand("sweep", "two-axis phase map");
  add_common(sweep, sweep_args);
  sweep->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*spectrum) return cmd_spectrum(spectrum_args);
    if (*simulate) return cmd_simulate(simulate_args);
    if (*sweep) return cmd_sweep(sweep_args, parallel);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
