/**
 * Two-parameter phase maps: one independent run + classification per grid
 * cell, evaluated in parallel with a static block partition so the result
 * never depends on scheduling.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ptmem/config.hpp"
#include "ptmem/errors.hpp"
#include "ptmem/format.hpp"
#include "ptmem/scenario.hpp"

namespace ptmem {

inline constexpr int kSweepSchemaVersion = 1;

struct SweepSpec {
  ScenarioConfig base;  // base.axis1 / base.axis2 define the grid

  static SweepSpec from_config(const ScenarioConfig& cfg) {
    if (!cfg.axis1 || !cfg.axis2) throw ConfigError("sweep requires [sweep] axis1 and axis2");
    SweepSpec s{cfg};
    s.validate();
    return s;
  }

  const SweepAxis& axis1() const { return *base.axis1; }
  const SweepAxis& axis2() const { return *base.axis2; }
  std::size_t cells() const { return axis1().count * axis2().count; }

  /// Scenario for cell (i, j); axis1 indexes i.
  ScenarioConfig cell_config(std::size_t i, std::size_t j) const {
    ScenarioConfig c = base;
    c.axis1.reset();
    c.axis2.reset();
    c.set_field(axis1().name, axis1().value(i));
    c.set_field(axis2().name, axis2().value(j));
    return c;
  }

  /// Structural checks only. A cell whose parameters are unphysical (say
  /// mu_less_rel <= mu_greater_rel in a full-square map) is marked failed
  /// in the grid rather than rejecting the whole sweep.
  void validate() const {
    base.validate();
    if (!base.axis1 || !base.axis2) throw ConfigError("sweep requires two axes");
  }
};

struct CellResult {
  double lambda_amp = std::numeric_limits<double>::quiet_NaN();
  PhaseKind phase = PhaseKind::PTSymmetric;
  bool diverged = false;
  std::optional<std::string> failure;  // set when the cell could not be evaluated
  std::size_t steps = 0;

  std::string phase_text() const { return failure ? "Failed(" + *failure + ")" : to_string(phase); }

  friend bool operator==(const CellResult& a, const CellResult& b) {
    const bool same_lambda =
        (std::isnan(a.lambda_amp) && std::isnan(b.lambda_amp)) || a.lambda_amp == b.lambda_amp;
    return same_lambda && a.phase == b.phase && a.diverged == b.diverged && a.failure == b.failure;
  }
};

struct SweepResult {
  SweepSpec spec;
  std::vector<CellResult> grid;  // row-major, index i * count2 + j

  // Runtime metadata; not persisted so that output files stay reproducible.
  double wall_seconds = 0.0;
  std::size_t total_steps = 0;

  const CellResult& at(std::size_t i, std::size_t j) const { return grid.at(i * spec.axis2().count + j); }

  /// Equality of spec echo and grid; runtime metadata is excluded.
  friend bool operator==(const SweepResult& a, const SweepResult& b) {
    return a.spec.base.to_ini() == b.spec.base.to_ini() && a.grid == b.grid;
  }
};

namespace detail {

inline std::string sanitize_reason(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '(' || c == ')') c = ';';
  return s;
}

inline CellResult run_cell(const ScenarioConfig& cfg) {
  CellResult r;
  try {
    const ScenarioOutcome o = run_scenario(cfg);
    r.lambda_amp = o.phase.lambda_amp;
    r.phase = o.phase.label;
    r.diverged = o.trajectory.diverged;
    r.steps = o.trajectory.steps;
  } catch (const std::exception& e) {
    r.failure = sanitize_reason(e.what());
  }
  return r;
}

}  // namespace detail

inline SweepResult run_sweep(const SweepSpec& spec, unsigned parallelism) {
  if (parallelism == 0) throw InvalidParameter("parallelism must be positive");
  spec.validate();

  SweepResult res{spec, std::vector<CellResult>(spec.cells())};
  const std::size_t n = spec.cells();
  const std::size_t n2 = spec.axis2().count;
  const std::size_t workers = std::min<std::size_t>(parallelism, n);

  auto work = [&](std::size_t w) {
    const std::size_t begin = w * n / workers;
    const std::size_t end = (w + 1) * n / workers;
    for (std::size_t k = begin; k < end; ++k) res.grid[k] = detail::run_cell(spec.cell_config(k / n2, k % n2));
  };

  const auto t0 = std::chrono::steady_clock::now();
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& c : res.grid) res.total_steps += c.steps;
  return res;
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr const char* kSweepColumns = "i,j,axis1_value,axis2_value,lambda_amp,phase,diverged";

inline void write_sweep(std::ostream& os, const SweepResult& r) {
  const auto& cfg = r.spec.base;
  os << "# schema=" << kSweepSchemaVersion << '\n';
  os << "# config_hash=" << cfg.hash() << '\n';
  os << "# axis1=" << r.spec.axis1().to_text() << '\n';
  os << "# axis2=" << r.spec.axis2().to_text() << '\n';
  std::istringstream ini(cfg.to_ini());
  for (std::string line; std::getline(ini, line);) os << "# config " << line << '\n';
  os << kSweepColumns << '\n';
  const std::size_t n1 = r.spec.axis1().count, n2 = r.spec.axis2().count;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const CellResult& c = r.grid[i * n2 + j];
      os << i << ',' << j << ',' << format_double(r.spec.axis1().value(i)) << ','
         << format_double(r.spec.axis2().value(j)) << ',' << format_double(c.lambda_amp) << ','
         << c.phase_text() << ',' << (c.diverged ? 1 : 0) << '\n';
    }
}

/// Writes the CSV and a sidecar `<path>.config.ini` holding the effective config.
inline void write_sweep(const SweepResult& r, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_sweep(out, r);
    if (!out) throw IoError("write failed for '" + path + "'");
  }
  std::ofstream side(path + ".config.ini", std::ios::binary);
  if (!side) throw IoError("cannot write '" + path + ".config.ini'");
  side << "; schema=" << kSweepSchemaVersion << "\n; config_hash=" << r.spec.base.hash() << '\n'
       << r.spec.base.to_ini();
}

inline SweepResult read_sweep(std::istream& is) {
  std::string line;
  std::optional<int> schema;
  std::string hash, axis1_text, axis2_text, ini;
  bool columns_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# schema=", 0) == 0) {
      double v = 0;
      if (!parse_double(line.substr(9), v)) throw SchemaError("bad schema line");
      schema = static_cast<int>(v);
    } else if (line.rfind("# config_hash=", 0) == 0) {
      hash = line.substr(14);
    } else if (line.rfind("# axis1=", 0) == 0) {
      axis1_text = line.substr(8);
    } else if (line.rfind("# axis2=", 0) == 0) {
      axis2_text = line.substr(8);
    } else if (line.rfind("# config", 0) == 0) {
      ini += line.size() > 9 ? line.substr(9) : std::string();
      ini += '\n';
    } else if (line == kSweepColumns) {
      columns_seen = true;
      break;
    } else if (!line.empty()) {
      throw SchemaError("unexpected header line '" + line + "'");
    }
  }
  if (!schema) throw SchemaError("missing schema version");
  if (*schema != kSweepSchemaVersion)
    throw SchemaError("schema version " + std::to_string(*schema) + " is not supported (expected " +
                      std::to_string(kSweepSchemaVersion) + ")");
  if (!columns_seen) throw SchemaError("missing column header");

  ScenarioConfig cfg;
  try {
    cfg = parse_config(ini);
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("embedded config invalid: ") + e.what());
  }
  if (cfg.hash() != hash) throw SchemaError("config hash mismatch");
  if (!cfg.axis1 || !cfg.axis2 || cfg.axis1->to_text() != axis1_text || cfg.axis2->to_text() != axis2_text)
    throw SchemaError("axis header disagrees with embedded config");

  SweepResult r{SweepSpec{cfg}, {}};
  const std::size_t n1 = cfg.axis1->count, n2 = cfg.axis2->count;
  r.grid.resize(n1 * n2);
  std::vector<char> seen(n1 * n2, 0);

  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 7) throw SchemaError("data row " + std::to_string(row) + ": expected 7 fields");
    double di = 0, dj = 0, lam = 0, dv = 0;
    if (!parse_double(f[0], di) || !parse_double(f[1], dj) || !parse_double(f[4], lam) || !parse_double(f[6], dv))
      throw SchemaError("data row " + std::to_string(row) + ": malformed number");
    if (di < 0 || dj < 0 || di >= static_cast<double>(n1) || dj >= static_cast<double>(n2))
      throw SchemaError("data row " + std::to_string(row) + ": cell index out of range");
    const auto i = static_cast<std::size_t>(di), j = static_cast<std::size_t>(dj);
    if (seen[i * n2 + j]) throw SchemaError("duplicate row for cell (" + f[0] + "," + f[1] + ")");
    seen[i * n2 + j] = 1;
    CellResult c;
    c.lambda_amp = lam;
    c.diverged = dv != 0.0;
    const std::string& ph = f[5];
    if (ph == "PTSymmetric") c.phase = PhaseKind::PTSymmetric;
    else if (ph == "PTBroken") c.phase = PhaseKind::PTBroken;
    else if (ph.rfind("Failed(", 0) == 0 && ph.back() == ')') c.failure = ph.substr(7, ph.size() - 8);
    else throw SchemaError("data row " + std::to_string(row) + ": unknown phase '" + ph + "'");
    r.grid[i * n2 + j] = c;
  }
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      if (!seen[i * n2 + j])
        throw SchemaError("missing row for cell (" + std::to_string(i) + "," + std::to_string(j) + ")");
  return r;
}

inline SweepResult read_sweep(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_sweep(in);
}

}  // namespace ptmem
