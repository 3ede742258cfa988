#ifndef FQHL_EXPERIMENT_HPP
#define FQHL_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fqhl/common.hpp"
#include "fqhl/galois_stats.hpp"
#include "fqhl/hlcount.hpp"

namespace fqhl {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Result records

inline json u128_json(u128 v) {
  if (v <= std::numeric_limits<u64>::max()) return static_cast<u64>(v);
  return to_string(v);
}

inline json to_json(const CountResult& r) {
  json j;
  j["kind"] = "count";
  j["field"] = r.field;
  j["n"] = r.n;
  j["offsets"] = r.offsets;
  j["mode"] = to_string(r.mode);
  if (r.mode == CountMode::kExact) {
    j["pi"] = u128_json(r.hits);
  } else {
    j["pi"] = r.pi;
  }
  j["prediction"] = r.prediction.str();
  j["abs_error"] = r.abs_error;
  j["normalized_error"] = r.normalized_error;
  j["sample_size"] = r.sample_size ? json(*r.sample_size) : json(nullptr);
  j["ci_half_width"] = r.ci_half_width ? json(*r.ci_half_width) : json(nullptr);
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  j["shard"] = std::to_string(r.shard.index) + "/" + std::to_string(r.shard.total);
  j["config_digest"] = r.config_digest;
  j["outside_theorem_hypotheses"] = r.outside_hypotheses;
  return j;
}

/// A Carmon-Rudnick tally tagged with its inputs.
struct CRRow {
  std::string field;
  std::size_t n = 0;
  std::vector<std::string> offsets;
  CRReport report;
  std::string config_digest;
};

inline json to_json(const CRRow& r) {
  json j;
  j["kind"] = "cr";
  j["field"] = r.field;
  j["n"] = r.n;
  j["offsets"] = r.offsets;
  j["N"] = u128_json(r.report.count);
  j["space"] = u128_json(r.report.space);
  j["density"] = r.report.density;
  j["not_squarefree"] = u128_json(r.report.not_squarefree);
  j["not_coprime"] = u128_json(r.report.not_coprime);
  j["constant"] = u128_json(r.report.constant);
  j["config_digest"] = r.config_digest;
  return j;
}

/// Joint cycle statistics tagged with their inputs.
struct CycleRow {
  std::string field;
  std::vector<std::string> offsets;
  u64 samples = 0;
  u64 seed = 0;
  JointCycleStats stats;
  std::string config_digest;
};

inline json stats_json(const JointCycleStats& s) {
  json j;
  j["n"] = s.n;
  j["r"] = s.r;
  j["total"] = s.total;
  j["discarded"] = s.discarded;
  json counts = json::object();
  for (const auto& [k, v] : s.counts) counts[tuple_label(k)] = v;
  j["counts"] = counts;
  json ref = json::object();
  for (const auto& [k, v] : s.reference) ref[k.str()] = v.str();
  j["reference"] = ref;
  return j;
}

inline CycleType parse_cycle_type(const std::string& s) {
  std::vector<unsigned> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, '+')) parts.push_back(static_cast<unsigned>(std::stoul(item)));
  return CycleType(std::move(parts));
}

inline JointCycleStats stats_from_json(const json& j) {
  JointCycleStats s(j.at("n").get<unsigned>(), j.at("r").get<unsigned>());
  for (const auto& [k, v] : j.at("counts").items()) {
    CycleTuple t;
    std::stringstream ss(k);
    std::string item;
    while (std::getline(ss, item, '|')) t.push_back(parse_cycle_type(item));
    s.add(t, v.get<u64>());
  }
  s.discarded = j.at("discarded").get<u64>();
  return s;
}

inline json to_json(const CycleRow& r) {
  json j = stats_json(r.stats);
  j["kind"] = "cycles";
  j["field"] = r.field;
  j["offsets"] = r.offsets;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  const auto parts = partitions_of(r.stats.n);
  const double cells = std::pow(static_cast<double>(parts.size()), r.stats.r);
  if (static_cast<double>(r.stats.total) >= 50 * cells) {
    const auto rep = independence_test(r.stats);
    j["joint_chi2"] = rep.joint.statistic;
    j["joint_dof"] = rep.joint.dof;
    j["joint_p_value"] = rep.joint.p_value;
  } else {
    j["joint_chi2"] = nullptr;
    j["joint_dof"] = nullptr;
    j["joint_p_value"] = nullptr;
  }
  j["config_digest"] = r.config_digest;
  return j;
}

using SweepRow = std::variant<CountResult, CRRow, CycleRow>;

inline json to_json(const SweepRow& row) {
  return std::visit([](const auto& r) { return to_json(r); }, row);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return csv_escape(v.get<std::string>());
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
    }
    return csv_escape(s);
  }
  return csv_escape(v.dump());
}

/// CSV with the JSON field names as header; rows must share one kind.
inline std::string render_csv(const std::vector<json>& rows) {
  if (rows.empty()) return "";
  // Record fields first in their documented order, anything else after, sorted.
  static const char* const kLeading[] = {"kind",       "field",           "n",
                                         "offsets",    "mode",            "pi",
                                         "prediction", "abs_error",       "normalized_error",
                                         "sample_size", "ci_half_width",  "seed",
                                         "shard",      "config_digest",   "outside_theorem_hypotheses"};
  std::vector<std::string> cols;
  for (const char* k : kLeading) {
    if (rows.front().contains(k)) cols.emplace_back(k);
  }
  for (const auto& [k, v] : rows.front().items()) {
    if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  }
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      out += row.contains(cols[i]) ? csv_cell(row[cols[i]]) : "";
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error-exponent regression

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  std::size_t points = 0;
  std::size_t excluded = 0;
};

/// Least-squares fit of log(abs_error) against log(q). Rows with zero error are
/// excluded and counted; at least 4 usable rows are required.
inline ExponentFit fit_error_exponent(const std::vector<CountResult>& rows) {
  ExponentFit fit;
  if (!rows.empty()) {
    for (const auto& r : rows) {
      if (r.n != rows.front().n || r.offsets.size() != rows.front().offsets.size()) {
        throw ValidationError("fit_error_exponent: rows mix different (n, r)");
      }
    }
  }
  // Sort by (q, error) so the accumulation order, and thus the rounding, does
  // not depend on row order.
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.abs_error == 0) {
      ++fit.excluded;
      continue;
    }
    pts.emplace_back(std::log(static_cast<double>(parse_field(r.field).order())), std::log(r.abs_error));
  }
  if (pts.size() < 4) {
    throw ValidationError("fit_error_exponent: need at least 4 rows with nonzero error, have " +
                          std::to_string(pts.size()));
  }
  std::sort(pts.begin(), pts.end());
  const double m = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0) throw ValidationError("fit_error_exponent: all rows share one q");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = pts.size();
  return fit;
}

// ---------------------------------------------------------------------------
// Sweep configuration

enum class SweepMode { kExact, kSample, kCR, kCycles };

inline const char* to_string(SweepMode m) {
  switch (m) {
    case SweepMode::kExact: return "exact";
    case SweepMode::kSample: return "sample";
    case SweepMode::kCR: return "cr";
    case SweepMode::kCycles: return "cycles";
  }
  return "?";
}

inline SweepMode parse_sweep_mode(const std::string& s) {
  if (s == "exact") return SweepMode::kExact;
  if (s == "sample" || s == "sampled") return SweepMode::kSample;
  if (s == "cr" || s == "cr-density") return SweepMode::kCR;
  if (s == "cycles" || s == "cycle-stats") return SweepMode::kCycles;
  throw ValidationError("unknown mode '" + s + "'");
}

/// A parameter sweep over a grid of fields at fixed n and offsets.
struct SweepConfig {
  std::vector<std::string> fields;  // "p" / "p^k" labels
  std::size_t n = 2;
  std::string offsets = "0,1";      // comma-separated polynomial texts
  SweepMode mode = SweepMode::kExact;
  u64 samples = 10000;
  u64 seed = 1;
  u64 shards = 1;
  u64 budget = kDefaultBudget;
  bool allow_even_q = false;
  unsigned threads = 1;
  std::string out;                  // JSON-lines path ("" = none)
  std::string csv;                  // CSV path ("" = none)
  std::string checkpoint;           // checkpoint path ("" = none)

  /// Canonical form of everything that determines the results and the shard
  /// layout; output paths, threads and budget are excluded.
  json canonical() const {
    json j;
    json grid = json::array();
    for (const auto& f : fields) grid.push_back(parse_field(f).label());
    j["fields"] = grid;
    j["n"] = n;
    json offs = json::array();
    for (const auto& s : split_poly_list(offsets)) offs.push_back(s);
    j["offsets"] = offs;
    j["mode"] = to_string(mode);
    if (mode == SweepMode::kSample || mode == SweepMode::kCycles) {
      j["samples"] = samples;
      j["seed"] = seed;
    }
    j["shards"] = shards;
    j["allow_even_q"] = allow_even_q;
    return j;
  }
  std::string digest() const { return stable_digest(canonical()); }
};

/// The q-grid policy: odd primes and odd prime powers up to qmax, ascending.
inline std::vector<std::string> odd_prime_power_grid(u64 qmin, u64 qmax) {
  std::vector<std::string> out;
  for (u64 q = std::max<u64>(qmin, 3); q <= qmax; ++q) {
    if (q % 2 == 0) continue;
    const auto ps = prime_factors(q);
    if (ps.size() == 1) out.push_back(parse_field(std::to_string(q)).label());
  }
  return out;
}

/// Flat "key = value" text; '#' starts a comment. Keys mirror the CLI flags.
inline SweepConfig parse_config_text(const std::string& text) {
  SweepConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto as_u64 = [&]() {
      try {
        std::size_t pos = 0;
        const u64 v = std::stoull(val, &pos);
        if (pos != val.size()) throw std::invalid_argument(val);
        return v;
      } catch (const std::exception&) {
        throw ValidationError("config line " + std::to_string(lineno) + ": '" + key + "' needs an integer");
      }
    };
    if (key == "field" || key == "fields") {
      c.fields.clear();
      for (const auto& f : split_poly_list(val)) {
        if (!f.empty()) c.fields.push_back(f);
      }
    } else if (key == "grid") {
      // "odd-prime-powers:3:499"
      std::vector<std::string> parts;
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(item);
      if (parts.size() != 3 || parts[0] != "odd-prime-powers") {
        throw ValidationError("config line " + std::to_string(lineno) + ": grid must be odd-prime-powers:MIN:MAX");
      }
      try {
        c.fields = odd_prime_power_grid(std::stoull(parts[1]), std::stoull(parts[2]));
      } catch (const std::logic_error&) {
        throw ValidationError("config line " + std::to_string(lineno) + ": bad grid bounds");
      }
    } else if (key == "n") {
      c.n = as_u64();
    } else if (key == "offsets") {
      c.offsets = val;
    } else if (key == "mode") {
      c.mode = parse_sweep_mode(val);
    } else if (key == "samples") {
      c.samples = as_u64();
    } else if (key == "seed") {
      c.seed = as_u64();
    } else if (key == "shards") {
      c.shards = as_u64();
    } else if (key == "budget") {
      c.budget = as_u64();
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(as_u64());
    } else if (key == "allow-even-q" || key == "allow_even_q") {
      c.allow_even_q = val == "true" || val == "1" || val == "yes";
    } else if (key == "out") {
      c.out = val;
    } else if (key == "csv") {
      c.csv = val;
    } else if (key == "checkpoint") {
      c.checkpoint = val;
    } else {
      throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Checkpoints

/// Progress of one (grid point, shard) unit.
struct UnitState {
  bool done = false;
  u128 cursor = 0;  // exact: next rank; sample: next draw index
  u128 hits = 0;
  u128 tested = 0;
  json payload;     // cr / cycles partial result once done
  friend bool operator==(const UnitState&, const UnitState&) = default;
};

struct Checkpoint {
  std::string config_digest;
  u64 shards = 1;
  std::vector<std::vector<UnitState>> units;  // [grid point][shard]

  bool complete() const {
    for (const auto& p : units) {
      for (const auto& u : p) {
        if (!u.done) return false;
      }
    }
    return true;
  }

  json to_json() const {
    json j;
    j["config_digest"] = config_digest;
    j["shards"] = shards;
    json pts = json::array();
    for (const auto& p : units) {
      json arr = json::array();
      for (const auto& u : p) {
        arr.push_back({{"done", u.done},
                       {"cursor", to_string(u.cursor)},
                       {"hits", to_string(u.hits)},
                       {"tested", to_string(u.tested)},
                       {"payload", u.payload}});
      }
      pts.push_back(arr);
    }
    j["units"] = pts;
    return j;
  }

  static u128 parse_u128(const std::string& s) {
    u128 v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') throw ValidationError("corrupt checkpoint number '" + s + "'");
      v = v * 10 + static_cast<unsigned>(c - '0');
    }
    return v;
  }

  static Checkpoint from_json(const json& j) {
    Checkpoint c;
    c.config_digest = j.at("config_digest").get<std::string>();
    c.shards = j.at("shards").get<u64>();
    for (const auto& p : j.at("units")) {
      std::vector<UnitState> row;
      for (const auto& u : p) {
        UnitState s;
        s.done = u.at("done").get<bool>();
        s.cursor = parse_u128(u.at("cursor").get<std::string>());
        s.hits = parse_u128(u.at("hits").get<std::string>());
        s.tested = parse_u128(u.at("tested").get<std::string>());
        s.payload = u.at("payload");
        row.push_back(std::move(s));
      }
      c.units.push_back(std::move(row));
    }
    return c;
  }

  /// Write to path via a temporary file and rename.
  void save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw IoError("cannot write checkpoint " + tmp);
      out << to_json().dump() << '\n';
      if (!out) throw IoError("cannot write checkpoint " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move checkpoint into place at " + path + ": " + ec.message());
  }

  static std::optional<Checkpoint> load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      return from_json(json::parse(ss.str()));
    } catch (const json::exception& e) {
      throw ValidationError("corrupt checkpoint " + path + ": " + e.what());
    }
  }
};

/// Raised when a checkpoint belongs to a different configuration.
class CheckpointMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// ---------------------------------------------------------------------------
// Sweep runner

/// Knobs for tests and interactive use; none of them changes the results.
struct SweepControl {
  bool resume = false;                   // continue from config.checkpoint if present
  std::optional<u64> stop_after_tests;   // interrupt once this many tests ran in this call
  u64 chunk = 1 << 16;                   // tests per progress step
  double checkpoint_interval_s = 1.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;            // one per grid point, in grid order
  bool complete = true;                  // false when interrupted
  std::vector<std::string> io_errors;    // per-path I/O failures

  std::vector<CountResult> count_rows() const {
    std::vector<CountResult> out;
    for (const auto& r : rows) {
      if (const auto* c = std::get_if<CountResult>(&r)) out.push_back(*c);
    }
    return out;
  }
};

namespace detail {

struct GridPoint {
  TupleSpec spec;
  u128 work = 0;  // total tests / tuples / draws
};

inline std::vector<GridPoint> build_grid(const SweepConfig& cfg) {
  std::vector<GridPoint> grid;
  std::vector<std::string> problems;
  if (cfg.shards < 1) throw ValidationError("shards must be >= 1");
  if ((cfg.mode == SweepMode::kSample || cfg.mode == SweepMode::kCycles) && cfg.samples < 1) {
    throw ValidationError("samples must be >= 1");
  }
  for (const auto& label : cfg.fields) {
    TupleSpec spec = make_tuple_spec(label, cfg.n, cfg.offsets, cfg.allow_even_q);
    for (const auto& v : validate_tuple(spec)) problems.push_back("field " + spec.field.label() + ": " + v);
    if (cfg.mode == SweepMode::kCR && cfg.n < 2) problems.push_back("cr mode needs n >= 2");
    GridPoint gp{spec, 0};
    const u64 q = spec.field.order();
    switch (cfg.mode) {
      case SweepMode::kExact: gp.work = checked_pow(q, static_cast<unsigned>(cfg.n)); break;
      case SweepMode::kCR: gp.work = cfg.n >= 2 ? checked_pow(q, static_cast<unsigned>(cfg.n - 1)) : 0; break;
      default: gp.work = cfg.samples; break;
    }
    grid.push_back(std::move(gp));
  }
  if (!problems.empty()) {
    std::string msg = "sweep aborted before any work:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  for (const auto& gp : grid) {
    if (gp.work > cfg.budget) {
      throw BudgetError("grid point " + gp.spec.field.label() + " needs " + to_string(gp.work) +
                        " units of work, budget is " + std::to_string(cfg.budget));
    }
  }
  return grid;
}

inline SweepRow assemble_row(const SweepConfig& cfg, const GridPoint& gp, const std::vector<UnitState>& units) {
  const TupleSpec& spec = gp.spec;
  switch (cfg.mode) {
    case SweepMode::kExact: {
      u128 hits = 0, tested = 0;
      for (const auto& u : units) {
        hits += u.hits;
        tested += u.tested;
      }
      return exact_result(spec, hits, tested, ShardId{0, 1});
    }
    case SweepMode::kSample: {
      u128 hits = 0;
      for (const auto& u : units) hits += u.hits;
      return sampled_result(spec, static_cast<u64>(hits), cfg.samples, cfg.seed);
    }
    case SweepMode::kCR: {
      const json& p = units.front().payload;
      CRRow row;
      row.field = spec.field.label();
      row.n = spec.n;
      row.offsets = offset_texts(spec);
      row.report.count = Checkpoint::parse_u128(p.at("N").get<std::string>());
      row.report.space = Checkpoint::parse_u128(p.at("space").get<std::string>());
      row.report.not_squarefree = Checkpoint::parse_u128(p.at("not_squarefree").get<std::string>());
      row.report.not_coprime = Checkpoint::parse_u128(p.at("not_coprime").get<std::string>());
      row.report.constant = Checkpoint::parse_u128(p.at("constant").get<std::string>());
      row.report.density = static_cast<double>(static_cast<long double>(row.report.count) /
                                               static_cast<long double>(row.report.space));
      json canon = canonical_spec(spec, CountMode::kExact);
      canon["mode"] = "cr";
      row.config_digest = stable_digest(canon);
      return row;
    }
    case SweepMode::kCycles: {
      CycleRow row;
      row.field = spec.field.label();
      row.offsets = offset_texts(spec);
      row.samples = cfg.samples;
      row.seed = cfg.seed;
      row.stats = JointCycleStats(static_cast<unsigned>(spec.n), static_cast<unsigned>(spec.r()));
      for (const auto& u : units) row.stats.merge(stats_from_json(u.payload));
      json canon = canonical_spec(spec, CountMode::kSampled, cfg.samples, cfg.seed);
      canon["mode"] = "cycles";
      row.config_digest = stable_digest(canon);
      return row;
    }
  }
  throw Error("unreachable");
}

/// Advances one unit by at most `chunk` tests; returns tests performed.
inline u64 step_unit(const SweepConfig& cfg, const GridPoint& gp, u64 shard, UnitState& st, u64 chunk) {
  const ShardId sid{shard, cfg.shards};
  switch (cfg.mode) {
    case SweepMode::kExact: {
      const RangeCount rc = count_exact_range(gp.spec, sid, st.cursor, chunk);
      st.hits += rc.hits;
      st.tested += rc.tested;
      st.cursor = rc.next_rank;
      st.done = rc.done;
      return static_cast<u64>(rc.tested);
    }
    case SweepMode::kSample: {
      // Draw indices congruent to shard, starting at the cursor.
      const u64 samples = cfg.samples;
      u64 start = static_cast<u64>(st.cursor);
      if (start < shard) start = shard;
      u64 count = 0;
      const u64 hits = gp.spec.field.visit([&](const auto& fld) {
        using F = std::decay_t<decltype(fld)>;
        detail::TupleTester<F> tuple(fld, gp.spec);
        std::vector<Elem> f(gp.spec.n + 1);
        u64 h = 0;
        u64 i = start;
        for (; i < samples && count < chunk; i += cfg.shards, ++count) {
          draw_monic(fld.order(), gp.spec.n, cfg.seed, i, f);
          if (tuple(f)) ++h;
        }
        st.cursor = i;
        return h;
      });
      st.hits += hits;
      st.tested += count;
      st.done = st.cursor >= samples;
      return count;
    }
    case SweepMode::kCR: {
      const CRReport rep = cr_count_exact(gp.spec, std::numeric_limits<u64>::max());
      st.payload = {{"N", to_string(rep.count)},
                    {"space", to_string(rep.space)},
                    {"not_squarefree", to_string(rep.not_squarefree)},
                    {"not_coprime", to_string(rep.not_coprime)},
                    {"constant", to_string(rep.constant)}};
      st.tested = rep.space;
      st.done = true;
      return static_cast<u64>(rep.space);
    }
    case SweepMode::kCycles: {
      const JointCycleStats s = joint_cycle_sample(gp.spec, cfg.samples, cfg.seed, sid);
      st.payload = stats_json(s);
      st.tested = s.total + s.discarded;
      st.done = true;
      return static_cast<u64>(st.tested);
    }
  }
  return 0;
}

}  // namespace detail

/// Runs every grid point (sharded, optionally resumed from a checkpoint), writes
/// rows as JSON lines in grid order as points complete, and renders CSV at the
/// end. Results depend only on the config, never on threads or interruptions.
inline SweepResult run_sweep(const SweepConfig& cfg, const SweepControl& ctl = {}) {
  SweepResult result;
  const auto grid = detail::build_grid(cfg);
  const std::string digest = cfg.digest();

  Checkpoint cp;
  cp.config_digest = digest;
  cp.shards = cfg.shards;
  cp.units.assign(grid.size(), std::vector<UnitState>(cfg.shards));
  if (ctl.resume && !cfg.checkpoint.empty()) {
    if (auto loaded = Checkpoint::load(cfg.checkpoint)) {
      if (loaded->config_digest != digest || loaded->shards != cfg.shards || loaded->units.size() != grid.size()) {
        throw CheckpointMismatch("checkpoint " + cfg.checkpoint + " has config digest " + loaded->config_digest +
                                 ", live config is " + digest + "; refusing to resume");
      }
      cp = std::move(*loaded);
    }
  }

  std::mutex mu;
  std::ofstream jsonl;
  bool jsonl_ok = false;
  auto note_io = [&](const std::string& msg) {
    if (std::find(result.io_errors.begin(), result.io_errors.end(), msg) == result.io_errors.end()) {
      result.io_errors.push_back(msg);
    }
  };
  if (!cfg.out.empty()) {
    jsonl.open(cfg.out, std::ios::trunc);
    jsonl_ok = static_cast<bool>(jsonl);
    if (!jsonl_ok) {
      note_io("cannot open " + cfg.out + " for writing");
    } else {
      json header{{"kind", "meta"}, {"config", cfg.canonical()}, {"config_digest", digest}};
      jsonl << header.dump() << '\n';
    }
  }

  std::vector<std::optional<SweepRow>> rows(grid.size());
  std::size_t next_to_write = 0;
  auto point_done = [&](std::size_t p) {
    return std::all_of(cp.units[p].begin(), cp.units[p].end(), [](const UnitState& u) { return u.done; });
  };
  // Called with mu held: emit every completed point in grid order.
  auto flush_rows = [&]() {
    while (next_to_write < grid.size() && point_done(next_to_write)) {
      rows[next_to_write] = detail::assemble_row(cfg, grid[next_to_write], cp.units[next_to_write]);
      if (jsonl_ok) {
        jsonl << to_json(*rows[next_to_write]).dump() << '\n';
        jsonl.flush();
        if (!jsonl) {
          jsonl_ok = false;
          note_io("write to " + cfg.out + " failed");
        }
      }
      ++next_to_write;
    }
  };
  auto last_save = std::chrono::steady_clock::now();
  auto save = [&]() {
    if (cfg.checkpoint.empty()) return;
    try {
      cp.save(cfg.checkpoint);
    } catch (const IoError& e) {
      note_io(e.what());
    }
    last_save = std::chrono::steady_clock::now();
  };

  {
    std::lock_guard<std::mutex> lock(mu);
    flush_rows();
  }

  std::vector<std::pair<std::size_t, u64>> todo;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (u64 s = 0; s < cfg.shards; ++s) {
      if (!cp.units[p][s].done) todo.emplace_back(p, s);
    }
  }
  std::atomic<std::size_t> next_unit{0};
  std::atomic<u64> tests_run{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  auto worker = [&]() {
    try {
      for (;;) {
        if (stop.load()) return;
        const std::size_t k = next_unit.fetch_add(1);
        if (k >= todo.size()) return;
        const auto [p, s] = todo[k];
        UnitState st;
        {
          std::lock_guard<std::mutex> lock(mu);
          st = cp.units[p][s];
        }
        while (!st.done) {
          u64 chunk = ctl.chunk;
          if (ctl.stop_after_tests) {
            const u64 ran = tests_run.load();
            if (ran >= *ctl.stop_after_tests) {
              stop = true;
              return;
            }
            chunk = std::min<u64>(chunk, *ctl.stop_after_tests - ran);
          }
          const u64 ran = detail::step_unit(cfg, grid[p], s, st, std::max<u64>(chunk, 1));
          tests_run += ran;
          std::lock_guard<std::mutex> lock(mu);
          cp.units[p][s] = st;
          if (st.done) flush_rows();
          if (std::chrono::duration<double>(std::chrono::steady_clock::now() - last_save).count() >=
              ctl.checkpoint_interval_s) {
            save();
          }
          if (stop.load()) return;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  };

  const unsigned nthreads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(todo.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  save();
  result.complete = cp.complete();
  for (auto& r : rows) {
    if (r) result.rows.push_back(std::move(*r));
  }
  if (result.complete && !cfg.csv.empty()) {
    std::vector<json> js;
    for (const auto& r : result.rows) js.push_back(to_json(r));
    std::ofstream csv(cfg.csv, std::ios::trunc);
    if (!csv) {
      note_io("cannot open " + cfg.csv + " for writing");
    } else {
      csv << render_csv(js);
      if (!csv) note_io("write to " + cfg.csv + " failed");
    }
  }
  return result;
}

}  // namespace fqhl

#endif  // FQHL_EXPERIMENT_HPP
