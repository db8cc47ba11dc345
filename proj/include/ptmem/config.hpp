/**
 * Scenario configuration: a sectioned key-value file (INI syntax) holding
 * every physical and numerical parameter of one run.
 *
 * Rates are given relative to the static thresholds
 * (gamma_rel = gamma/gamma_PT, mu_less_rel = mu_</mu_PT); times (dt, tau,
 * t_end) are in units of the LC period T0. Unknown keys and sections that do
 * not apply to the chosen variant are rejected. to_ini() renders the effective
 * configuration with every default resolved, in a fixed canonical order.
 */
#pragma once

#include <algorithm>
#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ptmem/circuit.hpp"
#include "ptmem/diagnostics.hpp"
#include "ptmem/errors.hpp"
#include "ptmem/format.hpp"

namespace ptmem {

enum class VariantKind { Static, Memristive, Meminductive };

inline std::string to_string(VariantKind v) {
  switch (v) {
    case VariantKind::Static: return "static";
    case VariantKind::Memristive: return "memristive";
    case VariantKind::Meminductive: return "meminductive";
  }
  return "?";
}

inline std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::Psi1: return "psi1";
    case InitialKind::Psi2: return "psi2";
    case InitialKind::Psi3: return "psi3";
    case InitialKind::Psi4: return "psi4";
    case InitialKind::Chi1: return "chi1";
    case InitialKind::Custom: return "custom";
  }
  return "?";
}

struct SweepAxis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::size_t count = 2;

  double value(std::size_t i) const {
    if (i + 1 == count) return max;
    return min + static_cast<double>(i) * (max - min) / static_cast<double>(count - 1);
  }
  std::string to_text() const {
    return name + "," + format_double(min) + "," + format_double(max) + "," + std::to_string(count);
  }
  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct ScenarioConfig {
  VariantKind variant = VariantKind::Static;

  // [circuit]
  double mu = 1.0;                   // static, memristive
  std::optional<double> gamma;       // static (absolute Gamma) or meminductive
  std::optional<double> gamma_rel;   // static only: gamma / gamma_PT(mu)

  // [memristor]
  double gamma_on_rel = 2.0;
  double gamma_off_rel = 0.3;
  double x0 = 0.5;

  // [meminductor]
  double mu_less_rel = 1.3;
  std::optional<double> mu_greater_rel;  // default mu_less_rel - 0.2
  double y0 = 0.5;

  // shared by both memory elements
  int eta = 1;
  int p = 1;

  // [initial]
  std::optional<InitialKind> state;  // default psi1, chi1 for meminductive
  std::optional<double> amplitude;   // default 0.5 v0, 1 i0 for chi1
  std::optional<PhiState> custom;

  // [numerics], times in units of T0
  double dt = 1.0 / 500.0;
  double tau = 100.0;
  std::optional<double> t_end;  // default 2 tau
  std::size_t decimation = 10;
  double clamp_epsilon = 1e-6;
  double divergence_cutoff = 1e12;
  double threshold = kDefaultPhaseThreshold;

  // [spectrum], static only
  double spectrum_gamma_rel_min = 0.0;
  double spectrum_gamma_rel_max = 5.1;
  std::size_t spectrum_count = 511;

  // [sweep]
  std::optional<SweepAxis> axis1;
  std::optional<SweepAxis> axis2;

  // Resolved accessors ------------------------------------------------------

  bool has_memory() const { return variant != VariantKind::Static; }
  InitialKind initial_kind() const {
    return state.value_or(variant == VariantKind::Meminductive ? InitialKind::Chi1 : InitialKind::Psi1);
  }
  double initial_amplitude() const {
    return amplitude.value_or(initial_kind() == InitialKind::Chi1 ? 1.0 : 0.5);
  }
  double resolved_mu_greater_rel() const { return mu_greater_rel.value_or(mu_less_rel - 0.2); }
  double resolved_t_end() const { return t_end.value_or(2.0 * tau); }

  /// Absolute Gamma of the static or meminductive dimer.
  double resolved_gamma() const {
    if (variant == VariantKind::Meminductive) return gamma.value_or(0.5);
    if (gamma) return *gamma;
    return gamma_rel.value_or(0.0) * gamma_pt(mu);
  }

  void validate() const;
  void set_field(std::string_view name, double value);
  std::string to_ini() const;
  std::string hash() const { return fnv1a_hex(to_ini()); }
};

// ---------------------------------------------------------------------------

namespace detail {

inline double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  if (!parse_double(text, v) || !std::isfinite(v))
    throw ConfigError("key '" + key + "': expected a finite number, got '" + text + "'");
  return v;
}

inline long parse_integer(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v)) throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  return static_cast<long>(v);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    std::string part(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    while (!part.empty() && (part.front() == ' ' || part.front() == '\t')) part.erase(part.begin());
    while (!part.empty() && (part.back() == ' ' || part.back() == '\t')) part.pop_back();
    out.push_back(part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline SweepAxis parse_axis(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw ConfigError("key '" + key + "': expected name,min,max,count");
  SweepAxis a;
  a.name = parts[0];
  a.min = parse_number(key, parts[1]);
  a.max = parse_number(key, parts[2]);
  const long n = parse_integer(key, parts[3]);
  if (n < 2) throw ConfigError("key '" + key + "': count must be at least 2");
  a.count = static_cast<std::size_t>(n);
  return a;
}

inline const std::vector<std::string>& axis_field_names() {
  static const std::vector<std::string> names = {
      "mu",     "gamma", "gamma_rel", "gamma_on_rel", "gamma_off_rel", "x0", "mu_less_rel",
      "mu_greater_rel", "y0", "amplitude", "eta", "p", "dt", "tau"};
  return names;
}

}  // namespace detail

inline void ScenarioConfig::set_field(std::string_view name, double v) {
  auto as_int = [&](const char* what) {
    if (v != std::floor(v)) throw ConfigError(std::string(what) + " must be an integer");
    return static_cast<int>(v);
  };
  if (name == "mu") mu = v;
  else if (name == "gamma") { gamma = v; gamma_rel.reset(); }
  else if (name == "gamma_rel") { gamma_rel = v; gamma.reset(); }
  else if (name == "gamma_on_rel") gamma_on_rel = v;
  else if (name == "gamma_off_rel") gamma_off_rel = v;
  else if (name == "x0") x0 = v;
  else if (name == "mu_less_rel") mu_less_rel = v;
  else if (name == "mu_greater_rel") mu_greater_rel = v;
  else if (name == "y0") y0 = v;
  else if (name == "amplitude") amplitude = v;
  else if (name == "eta") eta = as_int("eta");
  else if (name == "p") p = as_int("p");
  else if (name == "dt") dt = v;
  else if (name == "tau") tau = v;
  else throw ConfigError("unknown config field '" + std::string(name) + "'");
}

inline void ScenarioConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  if (variant != VariantKind::Meminductive) require(mu > 0.0, "circuit.mu must be positive");
  if (variant == VariantKind::Static) {
    require(!(gamma && gamma_rel), "circuit.gamma and circuit.gamma_rel are mutually exclusive");
    require(resolved_gamma() >= 0.0, "circuit gain-loss strength must be non-negative");
  }
  if (variant == VariantKind::Meminductive) require(resolved_gamma() > 0.0, "circuit.gamma must be positive");
  if (variant == VariantKind::Memristive) {
    require(gamma_off_rel > 0.0, "memristor.gamma_off_rel must be positive");
    require(gamma_on_rel > gamma_off_rel, "memristor.gamma_on_rel must exceed gamma_off_rel");
    require(x0 > 0.0 && x0 < 1.0, "memristor.x0 must lie in (0, 1)");
  }
  if (variant == VariantKind::Meminductive) {
    require(resolved_mu_greater_rel() > 0.0, "meminductor.mu_greater_rel must be positive");
    require(mu_less_rel > resolved_mu_greater_rel(), "meminductor.mu_less_rel must exceed mu_greater_rel");
    require(y0 > 0.0 && y0 < 1.0, "meminductor.y0 must lie in (0, 1)");
  }
  if (has_memory()) {
    require(eta == 1 || eta == -1, "eta must be +1 or -1");
    require(p >= 1, "window exponent p must be >= 1");
  }
  require(initial_kind() != InitialKind::Custom || custom.has_value(),
          "initial.state = custom requires initial.custom");
  require(!custom || initial_kind() == InitialKind::Custom, "initial.custom requires initial.state = custom");
  require(std::isfinite(initial_amplitude()), "initial.amplitude must be finite");
  require(dt > 0.0, "numerics.dt must be positive");
  require(tau > 0.0, "numerics.tau must be positive");
  require(resolved_t_end() >= 2.0 * tau, "numerics.t_end must be at least 2 tau");
  require(resolved_t_end() >= dt, "numerics.t_end must be at least dt");
  require(decimation >= 1, "numerics.decimation must be >= 1");
  require(clamp_epsilon > 0.0 && clamp_epsilon <= 1e-3, "numerics.clamp_epsilon must lie in (0, 1e-3]");
  require(divergence_cutoff > 1.0, "numerics.divergence_cutoff must exceed 1");
  require(threshold > 0.0, "numerics.threshold must be positive");
  if (variant == VariantKind::Static) {
    require(spectrum_gamma_rel_min >= 0.0, "spectrum.gamma_rel_min must be non-negative");
    require(spectrum_gamma_rel_max > spectrum_gamma_rel_min, "spectrum.gamma_rel_max must exceed gamma_rel_min");
    require(spectrum_count >= 2, "spectrum.count must be at least 2");
  }
  require(axis1.has_value() == axis2.has_value(), "sweep needs both axis1 and axis2");
  for (const auto* ax : {&axis1, &axis2}) {
    if (!*ax) continue;
    const auto& a = **ax;
    const auto& names = detail::axis_field_names();
    require(std::find(names.begin(), names.end(), a.name) != names.end(),
            "sweep axis '" + a.name + "' does not name a scalar config field");
    require(a.min < a.max, "sweep axis '" + a.name + "' needs min < max");
    require(a.count >= 2, "sweep axis '" + a.name + "' needs count >= 2");
  }
  if (axis1 && axis2) require(axis1->name != axis2->name, "sweep axes must differ");
}

inline std::string ScenarioConfig::to_ini() const {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto num = [&](const char* k, double v) { kv(k, format_double(v)); };

  os << "[model]\n";
  kv("variant", to_string(variant));

  os << "\n[circuit]\n";
  if (variant != VariantKind::Meminductive) num("mu", mu);
  if (variant == VariantKind::Static) {
    if (gamma) num("gamma", *gamma);
    else num("gamma_rel", gamma_rel.value_or(0.0));
  }
  if (variant == VariantKind::Meminductive) num("gamma", resolved_gamma());

  if (variant == VariantKind::Memristive) {
    os << "\n[memristor]\n";
    num("gamma_on_rel", gamma_on_rel);
    num("gamma_off_rel", gamma_off_rel);
    num("x0", x0);
    num("eta", eta);
    num("p", p);
  }
  if (variant == VariantKind::Meminductive) {
    os << "\n[meminductor]\n";
    num("mu_less_rel", mu_less_rel);
    num("mu_greater_rel", resolved_mu_greater_rel());
    num("y0", y0);
    num("eta", eta);
    num("p", p);
  }

  os << "\n[initial]\n";
  kv("state", to_string(initial_kind()));
  if (custom) {
    kv("custom", format_double(custom->v1) + "," + format_double(custom->v2) + "," + format_double(custom->i1) +
                     "," + format_double(custom->i2) + "," + format_double(custom->ic));
  } else {
    num("amplitude", initial_amplitude());
  }

  os << "\n[numerics]\n";
  num("dt", dt);
  num("tau", tau);
  num("t_end", resolved_t_end());
  num("decimation", static_cast<double>(decimation));
  num("clamp_epsilon", clamp_epsilon);
  num("divergence_cutoff", divergence_cutoff);
  num("threshold", threshold);

  if (variant == VariantKind::Static) {
    os << "\n[spectrum]\n";
    num("gamma_rel_min", spectrum_gamma_rel_min);
    num("gamma_rel_max", spectrum_gamma_rel_max);
    num("count", static_cast<double>(spectrum_count));
  }
  if (axis1 && axis2) {
    os << "\n[sweep]\n";
    kv("axis1", axis1->to_text());
    kv("axis2", axis2->to_text());
  }
  return os.str();
}

/// Parses and validates a scenario from INI text.
inline ScenarioConfig parse_config(const std::string& text) {
  namespace bpt = boost::property_tree;
  bpt::ptree tree;
  try {
    std::istringstream is(text);
    bpt::ini_parser::read_ini(is, tree);
  } catch (const bpt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ScenarioConfig cfg;
  // The variant decides which sections are admissible, so read it first.
  if (auto model = tree.get_child_optional("model")) {
    if (auto v = model->get_optional<std::string>("variant")) {
      if (*v == "static") cfg.variant = VariantKind::Static;
      else if (*v == "memristive") cfg.variant = VariantKind::Memristive;
      else if (*v == "meminductive") cfg.variant = VariantKind::Meminductive;
      else throw ConfigError("model.variant: unknown variant '" + *v + "'");
    }
  }

  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty())
      throw ConfigError("key '" + section + "' must appear inside a section");
    static const std::array<const char*, 8> known = {"model",   "circuit",  "memristor", "meminductor",
                                                     "initial", "numerics", "spectrum",  "sweep"};
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return section == k; }) == known.end())
      throw ConfigError("unknown section [" + section + "]");
    const bool memristive = cfg.variant == VariantKind::Memristive;
    const bool meminductive = cfg.variant == VariantKind::Meminductive;
    if (section == "memristor" && !memristive)
      throw ConfigError("section [memristor] requires model.variant = memristive");
    if (section == "meminductor" && !meminductive)
      throw ConfigError("section [meminductor] requires model.variant = meminductive");
    if (section == "spectrum" && cfg.variant != VariantKind::Static)
      throw ConfigError("section [spectrum] requires model.variant = static");

    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const std::string& val = node.data();
      auto number = [&] { return detail::parse_number(full, val); };
      auto unknown = [&] { throw ConfigError("unknown key '" + full + "'"); };

      if (section == "model") {
        if (key != "variant") unknown();
      } else if (section == "circuit") {
        if (key == "mu" && !meminductive) cfg.mu = number();
        else if (key == "gamma" && !memristive) cfg.gamma = number();
        else if (key == "gamma_rel" && cfg.variant == VariantKind::Static) cfg.gamma_rel = number();
        else unknown();
      } else if (section == "memristor") {
        if (key == "gamma_on_rel") cfg.gamma_on_rel = number();
        else if (key == "gamma_off_rel") cfg.gamma_off_rel = number();
        else if (key == "x0") cfg.x0 = number();
        else if (key == "eta") cfg.eta = static_cast<int>(detail::parse_integer(full, val));
        else if (key == "p") cfg.p = static_cast<int>(detail::parse_integer(full, val));
        else unknown();
      } else if (section == "meminductor") {
        if (key == "mu_less_rel") cfg.mu_less_rel = number();
        else if (key == "mu_greater_rel") cfg.mu_greater_rel = number();
        else if (key == "y0") cfg.y0 = number();
        else if (key == "eta") cfg.eta = static_cast<int>(detail::parse_integer(full, val));
        else if (key == "p") cfg.p = static_cast<int>(detail::parse_integer(full, val));
        else unknown();
      } else if (section == "initial") {
        if (key == "state") {
          if (val == "psi1") cfg.state = InitialKind::Psi1;
          else if (val == "psi2") cfg.state = InitialKind::Psi2;
          else if (val == "psi3") cfg.state = InitialKind::Psi3;
          else if (val == "psi4") cfg.state = InitialKind::Psi4;
          else if (val == "chi1") cfg.state = InitialKind::Chi1;
          else if (val == "custom") cfg.state = InitialKind::Custom;
          else throw ConfigError("initial.state: unknown state '" + val + "'");
        } else if (key == "amplitude") {
          cfg.amplitude = number();
        } else if (key == "custom") {
          const auto parts = detail::split(val, ',');
          if (parts.size() != 5) throw ConfigError("initial.custom: expected V1,V2,I1,I2,Ic");
          std::array<double, 5> a{};
          for (std::size_t k = 0; k < 5; ++k) a[k] = detail::parse_number(full, parts[k]);
          cfg.custom = PhiState::from_array(a);
        } else {
          unknown();
        }
      } else if (section == "numerics") {
        if (key == "dt") cfg.dt = number();
        else if (key == "tau") cfg.tau = number();
        else if (key == "t_end") cfg.t_end = number();
        else if (key == "decimation") {
          const long d = detail::parse_integer(full, val);
          if (d < 1) throw ConfigError("numerics.decimation must be >= 1");
          cfg.decimation = static_cast<std::size_t>(d);
        } else if (key == "clamp_epsilon") cfg.clamp_epsilon = number();
        else if (key == "divergence_cutoff") cfg.divergence_cutoff = number();
        else if (key == "threshold") cfg.threshold = number();
        else unknown();
      } else if (section == "spectrum") {
        if (key == "gamma_rel_min") cfg.spectrum_gamma_rel_min = number();
        else if (key == "gamma_rel_max") cfg.spectrum_gamma_rel_max = number();
        else if (key == "count") {
          const long n = detail::parse_integer(full, val);
          if (n < 2) throw ConfigError("spectrum.count must be at least 2");
          cfg.spectrum_count = static_cast<std::size_t>(n);
        } else unknown();
      } else if (section == "sweep") {
        if (key == "axis1") cfg.axis1 = detail::parse_axis(full, val);
        else if (key == "axis2") cfg.axis2 = detail::parse_axis(full, val);
        else unknown();
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Applies a "name=value" override (bare field name or section.key).
inline void apply_override(ScenarioConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' lacks '='");
  std::string name(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  if (const auto dot = name.find('.'); dot != std::string::npos) name = name.substr(dot + 1);
  if (name == "state" || name == "variant" || name == "custom" || name == "axis1" || name == "axis2") {
    // Non-numeric keys round-trip through the parser to reuse its validation.
    const std::string section = name == "variant" ? "model" : (name.rfind("axis", 0) == 0 ? "sweep" : "initial");
    namespace bpt = boost::property_tree;
    bpt::ptree tree;
    std::istringstream is(cfg.to_ini());
    bpt::ini_parser::read_ini(is, tree);
    tree.put(section + "." + name, value);
    if (name == "state" && value != "custom") tree.get_child("initial").erase("custom");
    std::ostringstream os;
    bpt::ini_parser::write_ini(os, tree);
    cfg = parse_config(os.str());
    return;
  }
  if (name == "t_end") { cfg.t_end = detail::parse_number(name, value); cfg.validate(); return; }
  if (name == "decimation") {
    const long d = detail::parse_integer(name, value);
    if (d < 1) throw ConfigError("decimation must be >= 1");
    cfg.decimation = static_cast<std::size_t>(d);
    cfg.validate();
    return;
  }
  if (name == "clamp_epsilon") cfg.clamp_epsilon = detail::parse_number(name, value);
  else if (name == "divergence_cutoff") cfg.divergence_cutoff = detail::parse_number(name, value);
  else if (name == "threshold") cfg.threshold = detail::parse_number(name, value);
  else cfg.set_field(name, detail::parse_number(name, value));
  cfg.validate();
}

}  // namespace ptmem
