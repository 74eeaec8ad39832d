// Copyright 2026 The hybridcoop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment configuration: a flat `key = value` text format where repeated
// keys (or comma-separated values) form lists and `#` starts a comment.
//
//   mode = finite
//   N = 100
//   beta = 0.1
//   beta = 1, 5
//
// Every key is validated against the mode; unknown keys are errors.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridcoop/game.hpp"
#include "hybridcoop/runner/output.hpp"

namespace hybridcoop::runner {

/// Configuration problem tied to a key (empty for file-level problems).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Mode { Finite, Replicator, Abm };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Finite: return "finite";
    case Mode::Replicator: return "replicator";
    case Mode::Abm: return "abm";
  }
  return "unknown";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "finite") return Mode::Finite;
  if (s == "replicator") return Mode::Replicator;
  if (s == "abm") return Mode::Abm;
  return std::nullopt;
}

/// Keys in first-appearance order, each with all of its values.
class RawConfig {
 public:
  void add(const std::string& key, std::string value) {
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(key, entries_.size());
      entries_.push_back({key, {}});
      it = index_.find(key);
    }
    entries_[it->second].second.push_back(std::move(value));
  }

  const std::vector<std::string>* find(const std::string& key) const {
    const auto it = index_.find(key);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  const std::vector<std::pair<std::string, std::vector<std::string>>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
  std::map<std::string, std::size_t> index_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Parses key=value lines. With `prefix`, only keys starting with it are
/// kept (stripped) and other lines are skipped; this reads the resolved
/// configuration back out of a run manifest.
inline RawConfig parse_key_values(std::istream& in, const std::string& source, std::string_view prefix = {}) {
  RawConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      if (!prefix.empty()) continue;
      throw ConfigError("", source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (!prefix.empty()) {
      if (!key.starts_with(prefix)) continue;
      key = key.substr(prefix.size());
    }
    if (key.empty()) throw ConfigError("", source + ":" + std::to_string(line_no) + ": empty key");
    std::size_t start = 0;
    while (true) {
      const auto comma = value.find(',', start);
      const std::string item = detail::trim(std::string_view(value).substr(start, comma - start));
      if (item.empty()) throw ConfigError(key, source + ":" + std::to_string(line_no) + ": empty value");
      cfg.add(key, item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return cfg;
}

inline constexpr std::string_view kManifestConfigPrefix = "config.";

/// Loads a config file; a `.manifest` file yields the configuration it
/// recorded.
inline RawConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  const bool manifest = path.extension() == ".manifest";
  return parse_key_values(in, path.string(), manifest ? kManifestConfigPrefix : std::string_view{});
}

enum class Topology { Lattice, BarabasiAlbert, Complete };

inline std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::Lattice: return "lattice";
    case Topology::BarabasiAlbert: return "ba";
    case Topology::Complete: return "complete";
  }
  return "unknown";
}

struct FiniteSpec {
  int N = 100;
  double c = 1.0;
  std::vector<int> M;
  std::vector<double> b;
  std::vector<double> beta;
  std::optional<double> beta_ai;  // unset: equal to beta
  std::vector<AIBehavior> ai;
};

struct ReplicatorSpec {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::optional<double> beta_ai;
  std::vector<double> b;
  double c = 1.0;
  std::vector<AIBehavior> ai;
  std::vector<double> x0;  // trajectory starting points, may be empty
  double t_end = 1000.0;
  double dt = 0.01;
  int curve_points = 1001;
  int trajectory_stride = 100;
};

struct AbmSpec {
  Topology topology = Topology::Lattice;
  std::size_t rows = 50;
  std::size_t cols = 50;
  bool periodic = false;
  std::size_t nodes = 1000;  // complete / ba
  std::size_t ba_m = 2;
  std::size_t networks = 10;
  std::vector<AIBehavior> ai;
  std::vector<double> ai_fraction;
  std::vector<double> beta;
  std::optional<double> beta_ai;
  std::vector<double> b;
  double c = 1.0;
  std::uint64_t steps = 100000;
  std::uint64_t sample_window = 1000;
  std::uint64_t sample_interval = 100;
  std::size_t runs = 30;
  bool hub_placement = false;
  std::vector<std::uint64_t> snapshot_steps;
  double initial_cooperation = 0.5;

  std::size_t node_count() const { return topology == Topology::Lattice ? rows * cols : nodes; }
};

struct ExperimentSpec {
  Mode mode = Mode::Finite;
  std::uint64_t seed = 0;
  FiniteSpec finite;
  ReplicatorSpec replicator;
  AbmSpec abm;
};

namespace detail {

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  const std::vector<std::string>* take(const std::string& key) {
    used_.insert(key);
    return raw_.find(key);
  }

  std::string scalar_text(const std::string& key, const std::vector<std::string>& values) {
    if (values.size() != 1) throw ConfigError(key, "expects a single value, got " + std::to_string(values.size()));
    return values.front();
  }

  static double to_double(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
      throw ConfigError(key, "'" + text + "' is not a finite number");
    }
    return v;
  }

  static long long to_integer(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
      throw ConfigError(key, "'" + text + "' is not an integer");
    }
    return v;
  }

  static std::uint64_t to_u64(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    if (!text.empty() && text.front() == '-') throw ConfigError(key, "'" + text + "' must be non-negative");
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
      throw ConfigError(key, "'" + text + "' is not an unsigned integer");
    }
    return v;
  }

  double real(const std::string& key, double fallback) {
    const auto* v = take(key);
    return v ? to_double(key, scalar_text(key, *v)) : fallback;
  }

  std::optional<double> optional_real(const std::string& key) {
    const auto* v = take(key);
    if (!v) return std::nullopt;
    return to_double(key, scalar_text(key, *v));
  }

  long long integer(const std::string& key, long long fallback) {
    const auto* v = take(key);
    return v ? to_integer(key, scalar_text(key, *v)) : fallback;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    const auto* v = take(key);
    return v ? to_u64(key, scalar_text(key, *v)) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto* v = take(key);
    if (!v) return fallback;
    const std::string t = scalar_text(key, *v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(key, "'" + t + "' is not a boolean");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const auto* v = take(key);
    return v ? scalar_text(key, *v) : fallback;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
    const auto* v = take(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& t : *v) out.push_back(to_double(key, t));
    return out;
  }

  std::vector<long long> integers(const std::string& key, std::vector<long long> fallback) {
    const auto* v = take(key);
    if (!v) return fallback;
    std::vector<long long> out;
    for (const auto& t : *v) out.push_back(to_integer(key, t));
    return out;
  }

  std::vector<std::uint64_t> u64s(const std::string& key, std::vector<std::uint64_t> fallback) {
    const auto* v = take(key);
    if (!v) return fallback;
    std::vector<std::uint64_t> out;
    for (const auto& t : *v) out.push_back(to_u64(key, t));
    return out;
  }

  std::vector<AIBehavior> behaviors(const std::string& key, std::vector<AIBehavior> fallback) {
    const auto* v = take(key);
    if (!v) return fallback;
    std::vector<AIBehavior> out;
    for (const auto& t : *v) {
      const auto b = parse_ai_behavior(t);
      if (!b) throw ConfigError(key, "unknown AI behaviour '" + t + "' (samaritan, malicious, discriminatory)");
      out.push_back(*b);
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, values] : raw_.entries()) {
      if (!used_.contains(key)) throw ConfigError(key, "unknown key");
    }
  }

 private:
  const RawConfig& raw_;
  std::set<std::string> used_;
};

inline std::vector<double> default_benefits() {
  std::vector<double> b{1.1};
  for (int i = 3; i <= 20; ++i) b.push_back(0.5 * i);  // 1.5, 2, ..., 10
  return b;
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

inline void require_non_empty(const std::string& key, std::size_t size) {
  require(size > 0, key, "grid must not be empty");
}

inline void check_benefits(const std::vector<double>& b, double c) {
  require(c > 0.0, "c", "donation game requires c > 0");
  for (double v : b) require(v > c, "b", "donation game requires b > c (b=" + format_number(v) + ")");
}

inline void check_betas(const std::vector<double>& beta, const std::optional<double>& beta_ai) {
  for (double v : beta) require(v >= 0.0, "beta", "intensity of selection must be >= 0");
  if (beta_ai) require(*beta_ai >= 0.0, "beta_ai", "intensity of selection must be >= 0");
}

}  // namespace detail

/// Applies defaults and validates `raw` for `mode`. A `mode` key, if
/// present, must agree with the requested mode.
inline ExperimentSpec resolve_config(Mode mode, const RawConfig& raw) {
  using detail::require;
  detail::Reader r(raw);
  ExperimentSpec spec;
  spec.mode = mode;
  const std::string declared = r.text("mode", std::string(to_string(mode)));
  require(parse_mode(declared).has_value(), "mode", "unknown mode '" + declared + "'");
  require(*parse_mode(declared) == mode, "mode",
          "config declares mode '" + declared + "' but '" + std::string(to_string(mode)) + "' was requested");
  spec.seed = r.u64("seed", 0);

  if (mode == Mode::Finite) {
    auto& f = spec.finite;
    const long long n = r.integer("N", 100);
    require(n >= 2 && n <= 1000000, "N", "number of humans must be >= 2");
    f.N = static_cast<int>(n);
    f.c = r.real("c", 1.0);
    std::vector<long long> default_m;
    for (int m = 0; m <= 100; m += 5) default_m.push_back(m);
    for (long long m : r.integers("M", default_m)) {
      require(m >= 0 && m <= 1000000, "M", "number of AIs must be >= 0");
      f.M.push_back(static_cast<int>(m));
    }
    f.b = r.reals("b", detail::default_benefits());
    f.beta = r.reals("beta", {0.1, 1.0, 5.0});
    f.beta_ai = r.optional_real("beta_ai");
    f.ai = r.behaviors("ai", {AIBehavior::Samaritan, AIBehavior::Discriminatory});
    detail::require_non_empty("M", f.M.size());
    detail::require_non_empty("b", f.b.size());
    detail::require_non_empty("beta", f.beta.size());
    detail::require_non_empty("ai", f.ai.size());
    detail::check_benefits(f.b, f.c);
    detail::check_betas(f.beta, f.beta_ai);
  } else if (mode == Mode::Replicator) {
    auto& p = spec.replicator;
    p.alpha = r.reals("alpha", {0.1, 0.5});
    p.beta = r.reals("beta", {0.1, 1.0, 5.0});
    p.beta_ai = r.optional_real("beta_ai");
    p.b = r.reals("b", {1.5, 2.0, 4.0, 6.0, 8.0, 10.0});
    p.c = r.real("c", 1.0);
    p.ai = r.behaviors("ai", {AIBehavior::Samaritan});
    p.x0 = r.reals("x0", {});
    p.t_end = r.real("t_end", 1000.0);
    p.dt = r.real("dt", 0.01);
    const long long points = r.integer("curve_points", 1001);
    const long long stride = r.integer("trajectory_stride", 100);
    detail::require_non_empty("alpha", p.alpha.size());
    detail::require_non_empty("beta", p.beta.size());
    detail::require_non_empty("b", p.b.size());
    detail::require_non_empty("ai", p.ai.size());
    for (double a : p.alpha) require(a >= 0.0 && a < 1.0, "alpha", "AI fraction must lie in [0, 1)");
    for (auto ai : p.ai) {
      require(ai != AIBehavior::Malicious, "ai", "replicator dynamics are defined for samaritan and discriminatory");
    }
    for (double x : p.x0) require(x >= 0.0 && x <= 1.0, "x0", "initial fraction must lie in [0, 1]");
    require(p.t_end >= 0.0, "t_end", "must be >= 0");
    require(p.dt > 0.0, "dt", "must be > 0");
    require(points >= 2 && points <= 10000000, "curve_points", "must be >= 2");
    require(stride >= 1, "trajectory_stride", "must be >= 1");
    p.curve_points = static_cast<int>(points);
    p.trajectory_stride = static_cast<int>(stride);
    detail::check_benefits(p.b, p.c);
    detail::check_betas(p.beta, p.beta_ai);
  } else {
    auto& a = spec.abm;
    const std::string topo = r.text("topology", "lattice");
    if (topo == "lattice") {
      a.topology = Topology::Lattice;
    } else if (topo == "ba") {
      a.topology = Topology::BarabasiAlbert;
    } else if (topo == "complete") {
      a.topology = Topology::Complete;
    } else {
      throw ConfigError("topology", "unknown topology '" + topo + "' (lattice, ba, complete)");
    }
    const long long rows = r.integer("rows", 50);
    const long long cols = r.integer("cols", 50);
    a.periodic = r.boolean("periodic", false);
    const long long nodes = r.integer("nodes", 1000);
    const long long ba_m = r.integer("ba_m", 2);
    const long long networks = r.integer("networks", 10);
    require(rows >= 2, "rows", "must be >= 2");
    require(cols >= 2, "cols", "must be >= 2");
    require(!a.periodic || (rows >= 3 && cols >= 3), "periodic", "periodic lattice needs rows, cols >= 3");
    require(nodes >= 2, "nodes", "must be >= 2");
    require(ba_m >= 1 && ba_m < nodes, "ba_m", "must satisfy 1 <= ba_m < nodes");
    require(networks >= 1, "networks", "must be >= 1");
    a.rows = static_cast<std::size_t>(rows);
    a.cols = static_cast<std::size_t>(cols);
    a.nodes = static_cast<std::size_t>(nodes);
    a.ba_m = static_cast<std::size_t>(ba_m);
    a.networks = static_cast<std::size_t>(networks);

    a.ai = r.behaviors("ai", {AIBehavior::Samaritan});
    a.ai_fraction = r.reals("ai_fraction", {0.0, 0.1, 0.2, 0.3, 0.4});
    a.beta = r.reals("beta", {0.1, 1.0, 5.0});
    a.beta_ai = r.optional_real("beta_ai");
    a.b = r.reals("b", {2.0});
    a.c = r.real("c", 1.0);
    a.steps = r.u64("steps", 100000);
    a.sample_window = r.u64("sample_window", std::min<std::uint64_t>(1000, a.steps));
    a.sample_interval = r.u64("sample_interval", 100);
    const long long runs = r.integer("runs", a.topology == Topology::BarabasiAlbert ? 200 : 30);
    const std::string placement = r.text("placement", "uniform");
    a.snapshot_steps = r.u64s("snapshot_steps", {0, 5000, 10000, a.steps});
    a.initial_cooperation = r.real("initial_cooperation", 0.5);

    detail::require_non_empty("ai", a.ai.size());
    detail::require_non_empty("ai_fraction", a.ai_fraction.size());
    detail::require_non_empty("beta", a.beta.size());
    detail::require_non_empty("b", a.b.size());
    require(a.steps >= 1, "steps", "must be >= 1");
    require(a.sample_window >= 1 && a.sample_window <= a.steps, "sample_window", "must lie in [1, steps]");
    require(a.sample_interval >= 1, "sample_interval", "must be >= 1");
    require(runs >= 1, "runs", "must be >= 1");
    a.runs = static_cast<std::size_t>(runs);
    require(placement == "uniform" || placement == "hub", "placement", "must be 'uniform' or 'hub'");
    a.hub_placement = placement == "hub";
    require(a.initial_cooperation >= 0.0 && a.initial_cooperation <= 1.0, "initial_cooperation",
            "must lie in [0, 1]");
    const std::size_t n = a.node_count();
    for (double f : a.ai_fraction) {
      require(f >= 0.0 && f < 1.0, "ai_fraction", "must lie in [0, 1)");
      require(static_cast<std::size_t>(std::llround(f * static_cast<double>(n))) < n, "ai_fraction",
              "leaves no human agents");
    }
    // Snapshots beyond the run length are dropped; duplicates collapse.
    std::vector<std::uint64_t> snaps;
    for (auto s : a.snapshot_steps) {
      if (s <= a.steps && std::find(snaps.begin(), snaps.end(), s) == snaps.end()) snaps.push_back(s);
    }
    std::sort(snaps.begin(), snaps.end());
    a.snapshot_steps = std::move(snaps);
    detail::check_benefits(a.b, a.c);
    detail::check_betas(a.beta, a.beta_ai);
  }
  r.reject_unknown();
  return spec;
}

inline ExperimentSpec parse_config(Mode mode, const std::filesystem::path& path) {
  return resolve_config(mode, load_config_file(path));
}

/// Fully resolved configuration as key/value pairs, in a fixed order; fed
/// back through resolve_config it yields the same spec.
inline std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto put = [&out](const std::string& k, const std::string& v) { out.emplace_back(k, v); };
  const auto put_reals = [&](const std::string& k, const std::vector<double>& vs) {
    for (double v : vs) put(k, format_number(v));
  };
  const auto put_ai = [&](const std::vector<AIBehavior>& vs) {
    for (auto v : vs) put("ai", std::string(to_string(v)));
  };
  put("mode", std::string(to_string(spec.mode)));
  put("seed", std::to_string(spec.seed));
  if (spec.mode == Mode::Finite) {
    const auto& f = spec.finite;
    put("N", std::to_string(f.N));
    put("c", format_number(f.c));
    for (int m : f.M) put("M", std::to_string(m));
    put_reals("b", f.b);
    put_reals("beta", f.beta);
    if (f.beta_ai) put("beta_ai", format_number(*f.beta_ai));
    put_ai(f.ai);
  } else if (spec.mode == Mode::Replicator) {
    const auto& p = spec.replicator;
    put_reals("alpha", p.alpha);
    put_reals("beta", p.beta);
    if (p.beta_ai) put("beta_ai", format_number(*p.beta_ai));
    put_reals("b", p.b);
    put("c", format_number(p.c));
    put_ai(p.ai);
    put_reals("x0", p.x0);
    put("t_end", format_number(p.t_end));
    put("dt", format_number(p.dt));
    put("curve_points", std::to_string(p.curve_points));
    put("trajectory_stride", std::to_string(p.trajectory_stride));
  } else {
    const auto& a = spec.abm;
    put("topology", std::string(to_string(a.topology)));
    put("rows", std::to_string(a.rows));
    put("cols", std::to_string(a.cols));
    put("periodic", a.periodic ? "true" : "false");
    put("nodes", std::to_string(a.nodes));
    put("ba_m", std::to_string(a.ba_m));
    put("networks", std::to_string(a.networks));
    put_ai(a.ai);
    put_reals("ai_fraction", a.ai_fraction);
    put_reals("beta", a.beta);
    if (a.beta_ai) put("beta_ai", format_number(*a.beta_ai));
    put_reals("b", a.b);
    put("c", format_number(a.c));
    put("steps", std::to_string(a.steps));
    put("sample_window", std::to_string(a.sample_window));
    put("sample_interval", std::to_string(a.sample_interval));
    put("runs", std::to_string(a.runs));
    put("placement", a.hub_placement ? "hub" : "uniform");
    for (auto s : a.snapshot_steps) put("snapshot_steps", std::to_string(s));
    put("initial_cooperation", format_number(a.initial_cooperation));
  }
  return out;
}

}  // namespace hybridcoop::runner
