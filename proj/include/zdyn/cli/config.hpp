#pragma once

// Experiment configuration: flat `key = value` lines grouped under
// `[section]` headers, `#` or `;` starting a comment. The schema is
// documented in README.md. Every validation error names the file, line,
// section and key it refers to.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zdyn/cli/csv.hpp"
#include "zdyn/cli/rng.hpp"
#include "zdyn/dynamics.hpp"
#include "zdyn/errors.hpp"
#include "zdyn/game.hpp"
#include "zdyn/scheme.hpp"

namespace zdyn::cli {

class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

struct IniValue {
  std::string text;
  int line = 0;
};

/// Raw sections of a config file, with line numbers kept for diagnostics.
class IniDocument {
 public:
  static IniDocument parse(std::istream& is, std::string source) {
    IniDocument doc;
    doc.source_ = std::move(source);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      std::string_view s = raw;
      if (const auto hash = s.find_first_of("#;"); hash != std::string_view::npos) s = s.substr(0, hash);
      s = detail::trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError(doc.where(line) + ": malformed section header");
        section = std::string(detail::trim(s.substr(1, s.size() - 2)));
        if (section.empty()) throw ConfigError(doc.where(line) + ": empty section name");
        if (doc.sections_.count(section)) throw ConfigError(doc.where(line) + ": duplicate section [" + section + "]");
        doc.sections_[section];
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) throw ConfigError(doc.where(line) + ": expected 'key = value'");
      if (section.empty()) throw ConfigError(doc.where(line) + ": key outside of any section");
      const std::string key(detail::trim(s.substr(0, eq)));
      if (key.empty()) throw ConfigError(doc.where(line) + ": empty key");
      auto& entries = doc.sections_[section];
      if (entries.count(key)) throw ConfigError(doc.where(line) + ": duplicate key [" + section + "] " + key);
      entries[key] = IniValue{std::string(detail::trim(s.substr(eq + 1))), line};
    }
    return doc;
  }

  const std::string& source() const { return source_; }
  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  const IniValue* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::string where(int line) const { return source_ + ":" + std::to_string(line); }

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const {
    const IniValue* v = find(section, key);
    const std::string loc = v ? where(v->line) : source_;
    throw ConfigError(loc + ": [" + section + "] " + key + ": " + message);
  }

  /// Rejects sections and keys outside the schema, which are almost always typos.
  void check_schema(const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& [section, entries] : sections_) {
      const auto s = schema.find(section);
      if (s == schema.end()) throw ConfigError(source_ + ": unknown section [" + section + "]");
      for (const auto& [key, value] : entries)
        if (!s->second.count(key)) throw ConfigError(where(value.line) + ": [" + section + "] unknown key '" + key + "'");
    }
  }

  double get_double(const std::string& section, const std::string& key) const {
    const IniValue* v = find(section, key);
    try {
      const double d = parse_double(v->text);
      if (!std::isfinite(d)) fail(section, key, "value must be finite");
      return d;
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput&) {
      fail(section, key, "expected a number, got '" + v->text + "'");
    }
  }

  std::uint64_t get_u64(const std::string& section, const std::string& key) const {
    const IniValue* v = find(section, key);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v->text.data(), v->text.data() + v->text.size(), out);
    if (res.ec != std::errc() || res.ptr != v->text.data() + v->text.size())
      fail(section, key, "expected a non-negative integer, got '" + v->text + "'");
    return out;
  }

  bool get_bool(const std::string& section, const std::string& key) const {
    const std::string& t = find(section, key)->text;
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    fail(section, key, "expected true or false, got '" + t + "'");
  }

  std::vector<double> get_list(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    std::string_view s = find(section, key)->text;
    while (true) {
      const auto comma = s.find(',');
      const std::string_view item = detail::trim(s.substr(0, comma));
      try {
        out.push_back(parse_double(item));
      } catch (const InvalidInput&) {
        fail(section, key, "expected a comma-separated list of numbers, bad item '" + std::string(item) + "'");
      }
      if (!std::isfinite(out.back())) fail(section, key, "list entries must be finite");
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
    return out;
  }

  /// `[[a, b], [c, d]]`
  Matrix get_matrix(const std::string& section, const std::string& key) const {
    const std::string& t = find(section, key)->text;
    std::vector<std::vector<double>> rows;
    std::size_t i = 0;
    auto skip = [&] {
      while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    };
    auto bad = [&](const std::string& why) { fail(section, key, "matrix literal: " + why); };
    skip();
    if (i >= t.size() || t[i] != '[') bad("expected '['");
    ++i;
    while (true) {
      skip();
      if (i >= t.size() || t[i] != '[') bad("expected '[' opening a row");
      const auto close = t.find(']', i);
      if (close == std::string::npos) bad("unterminated row");
      std::vector<double> row;
      std::string_view body(t.data() + i + 1, close - i - 1);
      while (true) {
        const auto comma = body.find(',');
        const auto item = detail::trim(body.substr(0, comma));
        try {
          row.push_back(parse_double(item));
        } catch (const InvalidInput&) {
          bad("bad entry '" + std::string(item) + "'");
        }
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
      }
      rows.push_back(std::move(row));
      i = close + 1;
      skip();
      if (i < t.size() && t[i] == ',') {
        ++i;
        continue;
      }
      if (i < t.size() && t[i] == ']') {
        ++i;
        break;
      }
      bad("expected ',' or ']' after a row");
    }
    skip();
    if (i != t.size()) bad("trailing characters");
    for (const auto& r : rows)
      if (r.size() != rows.front().size()) bad("rows have different lengths");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
  }

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, IniValue>> sections_;
};

struct GameSpec {
  std::optional<Matrix> literal;
  std::size_t random_dim = 0;
  std::optional<std::uint64_t> seed;
  double det_guard = 1e-3;

  GameMatrix build() const {
    if (literal) return GameMatrix(*literal);
    if (!seed) throw ConfigError("[game] random matrix requires a seed");
    return random_game(*seed, random_dim, det_guard);
  }
};

struct SchemeSpec {
  /// "gda", "ogda" or "custom" (explicit p and q).
  std::string preset = "ogda";
  std::vector<double> p{1.0, 0.0};
  std::vector<double> q{2.0, -1.0};
  bool allow_non_nash = false;

  bool is_ogda() const { return preset == "ogda"; }
  HgdaScheme build(double eta) const { return HgdaScheme(p, q, eta); }
  std::size_t horizon() const { return p.size(); }
};

struct EtaSpec {
  enum class Kind { Single, List, Sweep };
  Kind kind = Kind::Single;
  std::vector<double> values;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;

  /// Learning rates in ascending order for sweeps, as written otherwise.
  std::vector<double> grid() const {
    if (kind != Kind::Sweep) return values;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
      out[i] = i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
  }
};

struct SimSpec {
  std::size_t steps = 400;
  /// One joint state (x then y, length 2n) replicated over the history, or
  /// k states back to back (length 2nk). Empty: random if init_seed is set,
  /// otherwise all ones.
  std::vector<double> init;
  std::optional<std::uint64_t> init_seed;
  double guard = kDefaultGuard;
  bool enabled = true;

  std::vector<JointState> initial_states(std::size_t n, std::size_t k) const {
    const std::size_t dim = 2 * n;
    if (!init.empty()) {
      if (init.size() == dim) return replicate_initial(init, k);
      if (init.size() == dim * k) {
        std::vector<JointState> out;
        for (std::size_t i = 0; i < k; ++i)
          out.emplace_back(init.begin() + static_cast<std::ptrdiff_t>(i * dim),
                           init.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
        return out;
      }
      throw ConfigError("[sim] init: expected " + std::to_string(dim) + " or " + std::to_string(dim * k) +
                        " values, got " + std::to_string(init.size()));
    }
    if (init_seed) {
      SplitMix64 rng(*init_seed);
      return random_initial(rng, dim, k);
    }
    return replicate_initial(JointState(dim, 1.0), k);
  }
};

struct BoundarySpec {
  bool present = false;
  double lo = 0.0;
  double hi = 0.0;
  /// "analytic", "simulation" or "both".
  std::string method = "analytic";
  double width = 1e-6;
};

struct OutputSpec {
  std::string dir = "out";
  /// "csv" or "csv+svg".
  std::string format = "csv";
};

struct ExperimentConfig {
  GameSpec game;
  SchemeSpec scheme;
  EtaSpec eta;
  SimSpec sim;
  BoundarySpec boundary;
  OutputSpec output;
};

inline ExperimentConfig parse_config(std::istream& is, const std::string& source = "<config>") {
  const IniDocument doc = IniDocument::parse(is, source);
  doc.check_schema({
      {"game", {"matrix", "random_dim", "seed", "det_guard"}},
      {"scheme", {"preset", "p", "q", "allow_non_nash"}},
      {"eta", {"value", "list", "sweep_lo", "sweep_hi", "sweep_count"}},
      {"sim", {"steps", "init", "init_seed", "guard", "enabled"}},
      {"boundary", {"lo", "hi", "method", "width"}},
      {"output", {"dir", "format"}},
  });
  ExperimentConfig cfg;
  auto has = [&](const char* s, const char* k) { return doc.find(s, k) != nullptr; };

  // [game]
  if (!doc.has_section("game")) throw ConfigError(source + ": missing section [game]");
  if (has("game", "matrix") == has("game", "random_dim"))
    throw ConfigError(source + ": [game] needs exactly one of 'matrix' or 'random_dim'");
  if (has("game", "matrix")) {
    cfg.game.literal = doc.get_matrix("game", "matrix");
    if (!cfg.game.literal->square()) doc.fail("game", "matrix", "matrix must be square");
  } else {
    cfg.game.random_dim = doc.get_u64("game", "random_dim");
    if (cfg.game.random_dim == 0 || cfg.game.random_dim > 64) doc.fail("game", "random_dim", "must lie in 1..64");
    if (has("game", "seed")) cfg.game.seed = doc.get_u64("game", "seed");
    if (has("game", "det_guard")) {
      cfg.game.det_guard = doc.get_double("game", "det_guard");
      if (!(cfg.game.det_guard > 0.0)) doc.fail("game", "det_guard", "must be positive");
    }
  }
  if (cfg.game.literal && (has("game", "seed") || has("game", "det_guard")))
    throw ConfigError(source + ": [game] seed/det_guard only apply to random matrices");

  // [scheme]
  if (has("scheme", "preset")) cfg.scheme.preset = doc.find("scheme", "preset")->text;
  if (cfg.scheme.preset == "ogda") {
    cfg.scheme.p = {1.0, 0.0};
    cfg.scheme.q = {2.0, -1.0};
  } else if (cfg.scheme.preset == "gda") {
    cfg.scheme.p = {1.0};
    cfg.scheme.q = {1.0};
  } else if (cfg.scheme.preset == "custom") {
    if (!has("scheme", "p") || !has("scheme", "q")) throw ConfigError(source + ": [scheme] custom preset needs p and q");
    cfg.scheme.p = doc.get_list("scheme", "p");
    cfg.scheme.q = doc.get_list("scheme", "q");
    if (cfg.scheme.p.size() != cfg.scheme.q.size()) doc.fail("scheme", "q", "p and q must have the same length");
  } else {
    doc.fail("scheme", "preset", "expected gda, ogda or custom, got '" + cfg.scheme.preset + "'");
  }
  if (cfg.scheme.preset != "custom" && (has("scheme", "p") || has("scheme", "q")))
    throw ConfigError(source + ": [scheme] p and q require preset = custom");
  if (has("scheme", "allow_non_nash")) cfg.scheme.allow_non_nash = doc.get_bool("scheme", "allow_non_nash");

  // [eta]
  const int kinds = has("eta", "value") + has("eta", "list") + (has("eta", "sweep_lo") || has("eta", "sweep_hi") || has("eta", "sweep_count"));
  if (kinds > 1) throw ConfigError(source + ": [eta] give exactly one of value, list or sweep_lo/sweep_hi/sweep_count");
  if (has("eta", "value")) {
    cfg.eta.values = {doc.get_double("eta", "value")};
  } else if (has("eta", "list")) {
    cfg.eta.kind = EtaSpec::Kind::List;
    cfg.eta.values = doc.get_list("eta", "list");
  } else if (kinds == 1) {
    for (const char* k : {"sweep_lo", "sweep_hi", "sweep_count"})
      if (!has("eta", k)) throw ConfigError(source + ": [eta] sweep needs sweep_lo, sweep_hi and sweep_count");
    cfg.eta.kind = EtaSpec::Kind::Sweep;
    cfg.eta.lo = doc.get_double("eta", "sweep_lo");
    cfg.eta.hi = doc.get_double("eta", "sweep_hi");
    cfg.eta.count = doc.get_u64("eta", "sweep_count");
    if (!(cfg.eta.lo < cfg.eta.hi)) doc.fail("eta", "sweep_hi", "sweep range needs sweep_lo < sweep_hi");
    if (cfg.eta.count < 2) doc.fail("eta", "sweep_count", "sweep needs at least 2 points");
    if (cfg.eta.count > 10000000) doc.fail("eta", "sweep_count", "at most 10000000 points");
  }

  // [sim]
  if (has("sim", "steps")) {
    cfg.sim.steps = doc.get_u64("sim", "steps");
    if (cfg.sim.steps < cfg.scheme.horizon()) doc.fail("sim", "steps", "must be at least the scheme horizon");
    if (cfg.sim.steps > 100000000) doc.fail("sim", "steps", "at most 100000000 steps");
  }
  if (has("sim", "init") && has("sim", "init_seed")) throw ConfigError(source + ": [sim] give init or init_seed, not both");
  if (has("sim", "init")) cfg.sim.init = doc.get_list("sim", "init");
  if (has("sim", "init_seed")) cfg.sim.init_seed = doc.get_u64("sim", "init_seed");
  if (has("sim", "guard")) {
    cfg.sim.guard = doc.get_double("sim", "guard");
    if (!(cfg.sim.guard > 0.0)) doc.fail("sim", "guard", "must be positive");
  }
  if (has("sim", "enabled")) cfg.sim.enabled = doc.get_bool("sim", "enabled");

  // [boundary]
  if (doc.has_section("boundary")) {
    cfg.boundary.present = true;
    if (!has("boundary", "lo") || !has("boundary", "hi")) throw ConfigError(source + ": [boundary] needs lo and hi");
    cfg.boundary.lo = doc.get_double("boundary", "lo");
    cfg.boundary.hi = doc.get_double("boundary", "hi");
    if (!(cfg.boundary.lo < cfg.boundary.hi)) doc.fail("boundary", "hi", "bracket needs lo < hi");
    if (has("boundary", "method")) {
      cfg.boundary.method = doc.find("boundary", "method")->text;
      if (cfg.boundary.method != "analytic" && cfg.boundary.method != "simulation" && cfg.boundary.method != "both")
        doc.fail("boundary", "method", "expected analytic, simulation or both");
    }
    if (has("boundary", "width")) {
      cfg.boundary.width = doc.get_double("boundary", "width");
      if (!(cfg.boundary.width > 0.0)) doc.fail("boundary", "width", "must be positive");
    }
  }

  // [output]
  if (has("output", "dir")) cfg.output.dir = doc.find("output", "dir")->text;
  if (has("output", "format")) {
    cfg.output.format = doc.find("output", "format")->text;
    if (cfg.output.format != "csv" && cfg.output.format != "csv+svg") doc.fail("output", "format", "expected csv or csv+svg");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_config(in, path);
}

}  // namespace zdyn::cli
