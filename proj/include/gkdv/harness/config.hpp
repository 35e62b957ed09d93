#pragma once

// Experiment configuration: a small TOML subset (top-level keys, [table]
// headers, key = value with strings, numbers and booleans, # comments).
// Parsing never stops at the first problem; every syntax, key, type and
// range error is collected and reported together.
//
// Environment overrides: GKDV_<TABLE>_<KEY>=value (or GKDV_<KEY> for
// top-level keys), e.g. GKDV_SOLVER_DT=5e-4, applied after the file.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gkdv/continuation.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/gevrey.hpp"
#include "gkdv/probes.hpp"
#include "gkdv/solver.hpp"

namespace gkdv::harness {

inline constexpr const char* kEnvPrefix = "GKDV_";

enum class ExperimentKind { simulate, radius, energy, probe, continuation, sweep };
enum class OutputFormat { csv, json };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::radius: return "radius";
    case ExperimentKind::energy: return "energy";
    case ExperimentKind::probe: return "probe";
    case ExperimentKind::continuation: return "continuation";
    case ExperimentKind::sweep: return "sweep";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::simulate, ExperimentKind::radius, ExperimentKind::energy, ExperimentKind::probe,
                 ExperimentKind::continuation, ExperimentKind::sweep})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct InitialSpec {
  std::string kind = "random-analytic";  ///< soliton | sech | gaussian | random-analytic
  std::uint64_t seed = 1;
  double amplitude = 0.1;
  double decay = 1.5;  ///< random-analytic radius scale
  double width = 1.0;
  double x0 = 0.0;
  double speed = 1.0;  ///< soliton c
};

struct ProbeSettings {
  std::string kind = "all";  ///< all | multilinear | strichartz | holder | window | f-bound
  ProbeParams params{};
  EnsembleSpec ensemble{};
  FProbeSpec f{};
  double alpha = 0.0;      ///< f-bound exponent; 0 selects (k+4)/(2k) - 0.05
  double sigma_top = 0.8;  ///< largest sigma of the f-bound list
  int n_sigmas = 5;
  int f_ensemble_size = 20;  ///< members of the f-bound ensemble (each is a simulation)
};

struct SweepSettings {
  int n_sigmas = 8;
  double decades = 2.5;
  double sigma_top = 0.0;  ///< 0 selects half the estimated radius of u0
};

struct ContinuationSettings {
  ContinuationParams params{};  ///< sigma0, c0, c_ac of 0 mean "derive from the data"
  int envelope_points = 4;
  int induction_intervals = 3;
  int calibration_members = 10;
  double c_ac_safety = 4.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  SolverConfig solver{};
  GevreyParams gevrey{};
  InitialSpec initial{};
  ProbeSettings probe{};
  SweepSettings sweep{};
  ContinuationSettings continuation{};
  std::string output_dir = "out";
  OutputFormat format = OutputFormat::csv;
};

/// The documented default experiment, identical to configs/default.toml.
inline ExperimentConfig default_config() {
  ExperimentConfig c;
  c.solver.grid = GridSpec::standard(1024);
  c.continuation.params.sigma0 = 0.0;
  c.continuation.params.c0 = 0.0;
  c.continuation.params.c_ac = 0.0;
  return c;
}

namespace detail {

using Value = std::variant<std::string, double, std::int64_t, bool>;

struct Entry {
  Value value;
  std::string origin;  ///< "line N" or the environment variable name
};

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

/// Literal value. Bare words are accepted as strings only when `bare_ok`
/// (environment values are never quoted).
inline std::optional<Value> parse_value(const std::string& text, bool bare_ok) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    const std::string body = text.substr(1, text.size() - 2);
    if (body.find('"') != std::string::npos || body.find('\\') != std::string::npos) return std::nullopt;
    return Value{body};
  }
  if (text == "true") return Value{true};
  if (text == "false") return Value{false};
  std::int64_t i = 0;
  auto [pi, ei] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (ei == std::errc{} && pi == text.data() + text.size()) return Value{i};
  double d = 0.0;
  auto [pd, ed] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ed == std::errc{} && pd == text.data() + text.size() && std::isfinite(d)) return Value{d};
  if (bare_ok && !text.empty()) return Value{text};
  return std::nullopt;
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::map<std::string, Entry> parse_entries(std::string_view text, std::vector<std::string>& problems) {
  std::map<std::string, Entry> out;
  std::string table;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string raw(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || !valid_name(trim(line.substr(1, line.size() - 2)))) {
        problems.push_back(where + ": malformed table header '" + line + "'");
        continue;
      }
      table = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!valid_name(key)) {
      problems.push_back(where + ": invalid key '" + key + "'");
      continue;
    }
    const auto v = parse_value(val, false);
    if (!v) {
      problems.push_back(where + ": cannot parse value '" + val + "' for key '" + key + "'");
      continue;
    }
    const std::string path = table.empty() ? key : table + "." + key;
    if (out.count(path)) {
      problems.push_back(where + ": duplicate key '" + path + "'");
      continue;
    }
    out.emplace(path, Entry{*v, where});
  }
  return out;
}

enum class Kind { string, real, integer, boolean };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::string: return "string";
    case Kind::real: return "number";
    case Kind::integer: return "integer";
    case Kind::boolean: return "boolean";
  }
  return "?";
}

struct Field {
  std::string path;
  Kind kind;
  bool required;
  std::function<void(ExperimentConfig&, const Value&)> set;
  std::function<Value(const ExperimentConfig&)> get;
};

template <class T>
Field real_field(std::string path, bool required, T ExperimentConfig::* group, double T::* member) {
  return {std::move(path), Kind::real, required,
          [group, member](ExperimentConfig& c, const Value& v) {
            (c.*group).*member = std::holds_alternative<double>(v) ? std::get<double>(v)
                                                                   : static_cast<double>(std::get<std::int64_t>(v));
          },
          [group, member](const ExperimentConfig& c) { return Value{(c.*group).*member}; }};
}

template <class T, class I>
Field int_field(std::string path, bool required, T ExperimentConfig::* group, I T::* member) {
  return {std::move(path), Kind::integer, required,
          [group, member](ExperimentConfig& c, const Value& v) {
            (c.*group).*member = static_cast<I>(std::get<std::int64_t>(v));
          },
          [group, member](const ExperimentConfig& c) { return Value{static_cast<std::int64_t>((c.*group).*member)}; }};
}

/// Every accepted key. The order fixes the order of the resolved config.
inline const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back({"experiment", Kind::string, true,
                 [](C& c, const Value& v) { c.kind = *parse_kind(std::get<std::string>(v)); },
                 [](const C& c) { return Value{std::string(to_string(c.kind))}; }});
    f.push_back({"output_dir", Kind::string, false,
                 [](C& c, const Value& v) { c.output_dir = std::get<std::string>(v); },
                 [](const C& c) { return Value{c.output_dir}; }});
    f.push_back({"format", Kind::string, false,
                 [](C& c, const Value& v) {
                   c.format = std::get<std::string>(v) == "json" ? OutputFormat::json : OutputFormat::csv;
                 },
                 [](const C& c) { return Value{std::string(c.format == OutputFormat::json ? "json" : "csv")}; }});

    f.push_back(int_field("solver.k", true, &C::solver, &SolverConfig::k));
    f.push_back(int_field("solver.mu", true, &C::solver, &SolverConfig::mu));
    f.push_back(real_field("solver.dt", true, &C::solver, &SolverConfig::dt));
    f.push_back(real_field("solver.t_final", true, &C::solver, &SolverConfig::t_final));
    f.push_back(int_field("solver.monitor_stride", false, &C::solver, &SolverConfig::monitor_stride));
    f.push_back(real_field("solver.noise_floor", false, &C::solver, &SolverConfig::noise_floor));
    f.push_back({"solver.half_length", Kind::real, false,
                 [](C& c, const Value& v) {
                   const double l = std::holds_alternative<double>(v) ? std::get<double>(v)
                                                                      : static_cast<double>(std::get<std::int64_t>(v));
                   c.solver.grid = GridSpec(l, c.solver.grid.size());
                 },
                 [](const C& c) { return Value{c.solver.grid.half_length()}; }});
    f.push_back({"solver.n_modes", Kind::integer, false,
                 [](C& c, const Value& v) {
                   c.solver.grid = GridSpec(c.solver.grid.half_length(), static_cast<std::size_t>(std::get<std::int64_t>(v)));
                 },
                 [](const C& c) { return Value{static_cast<std::int64_t>(c.solver.grid.size())}; }});
    f.push_back({"solver.max_padded_points", Kind::integer, false,
                 [](C& c, const Value& v) {
                   c.solver.power.max_padded_points = static_cast<std::size_t>(std::max<std::int64_t>(0, std::get<std::int64_t>(v)));
                 },
                 [](const C& c) { return Value{static_cast<std::int64_t>(c.solver.power.max_padded_points)}; }});
    f.push_back({"solver.form", Kind::string, false,
                 [](C& c, const Value& v) {
                   c.solver.form = std::get<std::string>(v) == "skew-symmetric" ? Nonlinearity::skew_symmetric
                                                                                : Nonlinearity::conservative;
                 },
                 [](const C& c) {
                   return Value{std::string(c.solver.form == Nonlinearity::skew_symmetric ? "skew-symmetric"
                                                                                          : "conservative")};
                 }});

    f.push_back(real_field("gevrey.sigma", false, &C::gevrey, &GevreyParams::sigma));
    f.push_back(real_field("gevrey.s", false, &C::gevrey, &GevreyParams::s));
    f.push_back(real_field("gevrey.amp_guard", false, &C::gevrey, &GevreyParams::amp_guard));
    f.push_back(real_field("gevrey.fit_floor", false, &C::gevrey, &GevreyParams::fit_floor));

    f.push_back({"initial.kind", Kind::string, true,
                 [](C& c, const Value& v) { c.initial.kind = std::get<std::string>(v); },
                 [](const C& c) { return Value{c.initial.kind}; }});
    f.push_back(int_field("initial.seed", false, &C::initial, &InitialSpec::seed));
    f.push_back(real_field("initial.amplitude", false, &C::initial, &InitialSpec::amplitude));
    f.push_back(real_field("initial.decay", false, &C::initial, &InitialSpec::decay));
    f.push_back(real_field("initial.width", false, &C::initial, &InitialSpec::width));
    f.push_back(real_field("initial.x0", false, &C::initial, &InitialSpec::x0));
    f.push_back(real_field("initial.speed", false, &C::initial, &InitialSpec::speed));

    f.push_back({"probe.kind", Kind::string, false,
                 [](C& c, const Value& v) { c.probe.kind = std::get<std::string>(v); },
                 [](const C& c) { return Value{c.probe.kind}; }});
    f.push_back({"probe.s", Kind::real, false, [](C& c, const Value& v) { c.probe.params.s = std::get<double>(v); },
                 [](const C& c) { return Value{c.probe.params.s}; }});
    f.push_back({"probe.b", Kind::real, false, [](C& c, const Value& v) { c.probe.params.b = std::get<double>(v); },
                 [](const C& c) { return Value{c.probe.params.b}; }});
    f.push_back({"probe.eps", Kind::real, false, [](C& c, const Value& v) { c.probe.params.eps = std::get<double>(v); },
                 [](const C& c) { return Value{c.probe.params.eps}; }});
    f.push_back({"probe.sigma", Kind::real, false,
                 [](C& c, const Value& v) { c.probe.params.sigma = std::get<double>(v); },
                 [](const C& c) { return Value{c.probe.params.sigma}; }});
    f.push_back({"probe.ensemble_size", Kind::integer, false,
                 [](C& c, const Value& v) { c.probe.params.ensemble_size = static_cast<int>(std::get<std::int64_t>(v)); },
                 [](const C& c) { return Value{static_cast<std::int64_t>(c.probe.params.ensemble_size)}; }});
    f.push_back({"probe.seed", Kind::integer, false,
                 [](C& c, const Value& v) { c.probe.params.seed = static_cast<std::uint64_t>(std::get<std::int64_t>(v)); },
                 [](const C& c) { return Value{static_cast<std::int64_t>(c.probe.params.seed)}; }});
    f.push_back({"probe.n_modes", Kind::integer, false,
                 [](C& c, const Value& v) { c.probe.ensemble.n_modes = static_cast<std::size_t>(std::get<std::int64_t>(v)); },
                 [](const C& c) { return Value{static_cast<std::int64_t>(c.probe.ensemble.n_modes)}; }});
    f.push_back({"probe.n_time", Kind::integer, false,
                 [](C& c, const Value& v) { c.probe.ensemble.n_time = static_cast<std::size_t>(std::get<std::int64_t>(v)); },
                 [](const C& c) { return Value{static_cast<std::int64_t>(c.probe.ensemble.n_time)}; }});
    f.push_back(real_field("probe.alpha", false, &C::probe, &ProbeSettings::alpha));
    f.push_back(real_field("probe.sigma_top", false, &C::probe, &ProbeSettings::sigma_top));
    f.push_back(int_field("probe.n_sigmas", false, &C::probe, &ProbeSettings::n_sigmas));
    f.push_back(int_field("probe.f_ensemble_size", false, &C::probe, &ProbeSettings::f_ensemble_size));

    f.push_back(int_field("sweep.n_sigmas", false, &C::sweep, &SweepSettings::n_sigmas));
    f.push_back(real_field("sweep.decades", false, &C::sweep, &SweepSettings::decades));
    f.push_back(real_field("sweep.sigma_top", false, &C::sweep, &SweepSettings::sigma_top));

    auto cont_real = [](std::string path, double ContinuationParams::* m) {
      return Field{std::move(path), Kind::real, false,
                   [m](C& c, const Value& v) {
                     c.continuation.params.*m = std::holds_alternative<double>(v)
                                                    ? std::get<double>(v)
                                                    : static_cast<double>(std::get<std::int64_t>(v));
                   },
                   [m](const C& c) { return Value{c.continuation.params.*m}; }};
    };
    f.push_back(cont_real("continuation.sigma0", &ContinuationParams::sigma0));
    f.push_back(cont_real("continuation.s", &ContinuationParams::s));
    f.push_back(cont_real("continuation.a", &ContinuationParams::a));
    f.push_back(cont_real("continuation.c0", &ContinuationParams::c0));
    f.push_back(cont_real("continuation.c_ac", &ContinuationParams::c_ac));
    f.push_back(cont_real("continuation.alpha", &ContinuationParams::alpha));
    f.push_back(int_field("continuation.envelope_points", false, &C::continuation,
                          &ContinuationSettings::envelope_points));
    f.push_back(int_field("continuation.induction_intervals", false, &C::continuation,
                          &ContinuationSettings::induction_intervals));
    f.push_back(int_field("continuation.calibration_members", false, &C::continuation,
                          &ContinuationSettings::calibration_members));
    f.push_back(real_field("continuation.c_ac_safety", false, &C::continuation, &ContinuationSettings::c_ac_safety));
    return f;
  }();
  return all;
}

inline bool type_matches(Kind k, const Value& v) {
  switch (k) {
    case Kind::string: return std::holds_alternative<std::string>(v);
    case Kind::real: return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
    case Kind::integer: return std::holds_alternative<std::int64_t>(v);
    case Kind::boolean: return std::holds_alternative<bool>(v);
  }
  return false;
}

/// GKDV_SOLVER_T_FINAL -> solver.t_final; GKDV_OUTPUT_DIR -> output_dir.
inline std::optional<std::string> env_path(const std::string& name) {
  const std::string_view prefix = kEnvPrefix;
  if (name.rfind(prefix, 0) != 0) return std::nullopt;
  std::string rest;
  for (char c : name.substr(prefix.size())) rest += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const char* table : {"solver", "gevrey", "initial", "probe", "sweep", "continuation"}) {
    const std::string t = std::string(table) + "_";
    if (rest.rfind(t, 0) == 0) return std::string(table) + "." + rest.substr(t.size());
  }
  return rest;
}

inline void check_choice(const std::string& path, const std::string& v, std::initializer_list<const char*> allowed,
                         std::vector<std::string>& problems) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return;
    list += (list.empty() ? "" : " | ") + std::string(a);
  }
  problems.push_back(path + ": '" + v + "' is not one of " + list);
}

inline void collect(const std::function<void()>& validate, std::vector<std::string>& problems) {
  try {
    validate();
  } catch (const ValidationError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  } catch (const ConfigurationError& e) {
    problems.emplace_back(e.what());
  }
}

}  // namespace detail

/// Range checks of a fully populated config. Returns every violation.
inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> problems;
  detail::collect([&] { c.solver.validate(); }, problems);
  detail::collect([&] { c.gevrey.validate(); }, problems);
  if (c.solver.power.max_padded_points < 1) problems.push_back("solver.max_padded_points must be >= 1");
  const auto& in = c.initial;
  if (!(in.amplitude > 0.0)) problems.push_back("initial.amplitude must be > 0");
  if (!(in.width > 0.0)) problems.push_back("initial.width must be > 0");
  if (!(in.decay > 0.0)) problems.push_back("initial.decay must be > 0");
  if (!(in.speed > 0.0)) problems.push_back("initial.speed must be > 0");
  if (in.kind == "soliton" && c.solver.mu != 1) problems.push_back("initial.kind = soliton requires solver.mu = 1");
  switch (c.kind) {
    case ExperimentKind::probe: {
      detail::collect([&] { c.probe.params.validate(); }, problems);
      if (c.probe.n_sigmas < 2) problems.push_back("probe.n_sigmas must be >= 2");
      if (c.probe.f_ensemble_size < 20) problems.push_back("probe.f_ensemble_size must be >= 20");
      const bool all = c.probe.kind == "all";
      if ((all || c.probe.kind == "multilinear") && !(c.probe.params.s > (c.solver.k - 4) / (2.0 * c.solver.k)))
        problems.push_back("probe.s must exceed (k-4)/(2k) for the multilinear probe");
      if ((all || c.probe.kind == "holder") && c.solver.k < 4)
        problems.push_back("solver.k must be >= 4 for the holder probe");
      if (!(c.probe.sigma_top > 0.0)) problems.push_back("probe.sigma_top must be > 0");
      const int k = c.solver.k;
      if (c.probe.alpha != 0.0 && !(c.probe.alpha > 0.0 && c.probe.alpha < (k + 4) / (2.0 * k)))
        problems.push_back("probe.alpha must lie in (0, (k+4)/(2k))");
      break;
    }
    case ExperimentKind::sweep:
      if (c.solver.mu != -1 || c.solver.k % 2 != 0) problems.push_back("sweep requires solver.mu = -1 and even k");
      if (c.sweep.n_sigmas < 2) problems.push_back("sweep.n_sigmas must be >= 2");
      if (!(c.sweep.decades > 0.0)) problems.push_back("sweep.decades must be > 0");
      if (c.sweep.sigma_top < 0.0) problems.push_back("sweep.sigma_top must be >= 0");
      break;
    case ExperimentKind::continuation: {
      // 0 in sigma0, c0 or c_ac means "derive"; validate with placeholders.
      auto p = c.continuation.params;
      p.k = c.solver.k;
      p.mu = c.solver.mu;
      for (double* v : {&p.sigma0, &p.c0, &p.c_ac})
        if (*v == 0.0) *v = 1.0;
      detail::collect([&] { p.validate(); }, problems);
      if (c.continuation.envelope_points < 4) problems.push_back("continuation.envelope_points must be >= 4");
      if (c.continuation.induction_intervals < 1) problems.push_back("continuation.induction_intervals must be >= 1");
      if (c.continuation.calibration_members < 1) problems.push_back("continuation.calibration_members must be >= 1");
      if (!(c.continuation.c_ac_safety >= 1.0)) problems.push_back("continuation.c_ac_safety must be >= 1");
      break;
    }
    case ExperimentKind::energy:
      if (c.solver.monitor_stride % 2 != 0) problems.push_back("solver.monitor_stride must be even for energy runs");
      if (static_cast<double>(c.solver.monitor_stride) * c.solver.dt > 1e-2)
        problems.push_back("solver.monitor_stride * solver.dt must be <= 1e-2 for energy runs");
      break;
    default: break;
  }
  return problems;
}

/// Parse, apply overrides and validate. Precedence: file, then environment
/// variables (GKDV_*), then `overrides` keyed by key path (command line).
/// Throws ValidationError listing every problem found.
inline ExperimentConfig parse_config(std::string_view text, const std::map<std::string, std::string>& env = {},
                                     const std::map<std::string, std::string>& overrides = {}) {
  std::vector<std::string> problems;
  auto entries = detail::parse_entries(text, problems);
  auto apply = [&](const std::string& path, const std::string& raw, const std::string& origin) {
    const auto v = detail::parse_value(detail::trim(raw), true);
    if (!v) {
      problems.push_back(origin + ": cannot parse value '" + raw + "'");
      return;
    }
    entries[path] = detail::Entry{*v, origin};
  };
  for (const auto& [name, raw] : env)
    if (const auto path = detail::env_path(name)) apply(*path, raw, name);
  for (const auto& [path, raw] : overrides) apply(path, raw, "command line");

  ExperimentConfig cfg = default_config();
  std::map<std::string, bool> known;
  for (const auto& f : detail::fields()) {
    known[f.path] = true;
    const auto it = entries.find(f.path);
    if (it == entries.end()) {
      if (f.required) problems.push_back("missing required key '" + f.path + "'");
      continue;
    }
    const auto& [v, origin] = it->second;
    if (!detail::type_matches(f.kind, v)) {
      problems.push_back(origin + ": '" + f.path + "' expects " + detail::kind_name(f.kind));
      continue;
    }
    if (f.path == "experiment" && !parse_kind(std::get<std::string>(v))) {
      detail::check_choice(f.path, std::get<std::string>(v),
                           {"simulate", "radius", "energy", "probe", "continuation", "sweep"}, problems);
      continue;
    }
    if (f.path == "format") {
      const auto before = problems.size();
      detail::check_choice(f.path, std::get<std::string>(v), {"csv", "json"}, problems);
      if (problems.size() != before) continue;
    }
    if (f.path == "initial.kind") {
      const auto before = problems.size();
      detail::check_choice(f.path, std::get<std::string>(v), {"soliton", "sech", "gaussian", "random-analytic"},
                           problems);
      if (problems.size() != before) continue;
    }
    if (f.path == "probe.kind") {
      const auto before = problems.size();
      detail::check_choice(f.path, std::get<std::string>(v), {"all", "multilinear", "strichartz", "holder", "window", "f-bound"},
                           problems);
      if (problems.size() != before) continue;
    }
    if (f.path == "solver.form") {
      const auto before = problems.size();
      detail::check_choice(f.path, std::get<std::string>(v), {"conservative", "skew-symmetric"}, problems);
      if (problems.size() != before) continue;
    }
    if (f.path == "solver.n_modes" || f.path == "solver.half_length") {
      try {
        f.set(cfg, v);
      } catch (const ConfigurationError& e) {
        problems.push_back(f.path + ": " + e.what());
      }
      continue;
    }
    f.set(cfg, v);
  }
  for (const auto& [path, e] : entries)
    if (!known.count(path)) problems.push_back(e.origin + ": unknown key '" + path + "'");

  // Keys that failed above keep their defaults, so range checks on the
  // rest stay meaningful.
  auto more = validate_config(cfg);
  problems.insert(problems.end(), more.begin(), more.end());
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return cfg;
}

/// Resolved configuration as (key path, value) pairs in schema order.
inline std::vector<std::pair<std::string, detail::Value>> resolved_entries(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, detail::Value>> out;
  for (const auto& f : detail::fields()) out.emplace_back(f.path, f.get(c));
  return out;
}

}  // namespace gkdv::harness
