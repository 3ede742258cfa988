// Command-line front end: tuple counts, estimates, Carmon-Rudnick densities,
// cycle statistics, sweeps and error-exponent fits.
//
// Exit codes: 0 success, 2 validation failure, 3 budget refusal, 4 I/O failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fqhl/fqhl.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
  std::string field = "5";
  std::size_t n = 2;
  std::string offsets = "0,1";
  fqhl::u64 samples = 100000;
  fqhl::u64 seed = 1;
  fqhl::u64 shards = 1;
  fqhl::u64 budget = fqhl::kDefaultBudget;
  std::string out;
  std::string format = "json";
  bool allow_even_q = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--field", o.field, "field: p or p^k");
  cmd->add_option("--n", o.n, "degree of f");
  cmd->add_option("--offsets", o.offsets, "comma-separated offset polynomials");
  cmd->add_option("--samples", o.samples, "number of random draws");
  cmd->add_option("--seed", o.seed, "64-bit seed");
  cmd->add_option("--shards", o.shards, "number of shards");
  cmd->add_option("--budget", o.budget, "maximum tuple tests");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--allow-even-q", o.allow_even_q, "permit even q (results are flagged outside the odd-q hypothesis)");
}

void emit(const CommonOpts& o, const fqhl::json& row) {
  std::string text = o.format == "csv" ? fqhl::render_csv({row}) : row.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::trunc);
  if (!f || !(f << text)) throw fqhl::IoError("cannot write " + o.out);
}

fqhl::TupleSpec spec_of(const CommonOpts& o) {
  auto spec = fqhl::make_tuple_spec(o.field, o.n, o.offsets, o.allow_even_q);
  fqhl::require_valid(spec);
  return spec;
}

int run_count(const CommonOpts& o) {
  const auto spec = spec_of(o);
  fqhl::u128 hits = 0, tested = 0;
  for (fqhl::u64 s = 0; s < o.shards; ++s) {
    const auto r = fqhl::pi_exact(spec, {s, o.shards}, o.budget);
    hits += r.hits;
    tested += r.tested;
  }
  emit(o, fqhl::to_json(fqhl::exact_result(spec, hits, tested, {0, 1})));
  return 0;
}

int run_estimate(const CommonOpts& o) {
  const auto spec = spec_of(o);
  if (o.samples > o.budget) throw fqhl::BudgetError("samples exceed budget");
  emit(o, fqhl::to_json(fqhl::pi_sample(spec, o.samples, o.seed)));
  return 0;
}

int run_cr(const CommonOpts& o) {
  const auto spec = spec_of(o);
  fqhl::CRRow row{spec.field.label(), spec.n, fqhl::offset_texts(spec), fqhl::cr_count_exact(spec, o.budget), {}};
  auto canon = fqhl::canonical_spec(spec, fqhl::CountMode::kExact);
  canon["mode"] = "cr";
  row.config_digest = fqhl::stable_digest(canon);
  emit(o, fqhl::to_json(row));
  return 0;
}

int run_cycles(const CommonOpts& o) {
  const auto spec = spec_of(o);
  if (o.samples > o.budget) throw fqhl::BudgetError("samples exceed budget");
  fqhl::CycleRow row{spec.field.label(), fqhl::offset_texts(spec), o.samples, o.seed,
                     fqhl::joint_cycle_sample(spec, o.samples, o.seed), {}};
  auto canon = fqhl::canonical_spec(spec, fqhl::CountMode::kSampled, o.samples, o.seed);
  canon["mode"] = "cycles";
  row.config_digest = fqhl::stable_digest(canon);
  emit(o, fqhl::to_json(row));
  return 0;
}

std::vector<fqhl::CountResult> read_count_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fqhl::IoError("cannot read " + path);
  std::vector<fqhl::CountResult> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = fqhl::json::parse(line);
    if (j.value("kind", "") != "count") continue;
    fqhl::CountResult r;
    r.field = j.at("field").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.offsets = j.at("offsets").get<std::vector<std::string>>();
    r.abs_error = j.at("abs_error").get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-Littlewood tuple counts over F_q[t]"};
  app.require_subcommand(1);

  CommonOpts count_o, est_o, cr_o, cyc_o;
  auto* count = app.add_subcommand("count", "exact pi(q,n;a) by enumeration");
  add_common(count, count_o);
  auto* estimate = app.add_subcommand("estimate", "sampled estimate of pi(q,n;a)");
  add_common(estimate, est_o);
  auto* cr = app.add_subcommand("cr-density", "Carmon-Rudnick discriminant density");
  add_common(cr, cr_o);
  auto* cycles = app.add_subcommand("cycle-stats", "joint cycle-type statistics and independence test");
  add_common(cycles, cyc_o);

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  std::string config_path, grid, fields_csv, mode, sweep_offsets, out, csv, checkpoint;
  fqhl::u64 sw_n = 0, sw_samples = 0, sw_seed = 0, sw_shards = 0, sw_budget = 0;
  unsigned threads = 0;
  bool resume = false, sw_even = false;
  sweep->add_option("--config", config_path, "key = value config file");
  sweep->add_option("--field", fields_csv, "comma-separated field grid");
  sweep->add_option("--grid", grid, "odd-prime-powers:MIN:MAX");
  sweep->add_option("--n", sw_n, "degree of f");
  sweep->add_option("--offsets", sweep_offsets, "comma-separated offset polynomials");
  sweep->add_option("--mode", mode, "exact | sample | cr | cycles");
  sweep->add_option("--samples", sw_samples, "draws per grid point");
  sweep->add_option("--seed", sw_seed, "64-bit seed");
  sweep->add_option("--shards", sw_shards, "shards per grid point");
  sweep->add_option("--budget", sw_budget, "maximum work per grid point");
  sweep->add_option("--threads", threads, "worker threads");
  sweep->add_option("--out", out, "JSON-lines output path");
  sweep->add_option("--csv", csv, "CSV output path");
  sweep->add_option("--checkpoint", checkpoint, "checkpoint path");
  sweep->add_flag("--resume", resume, "resume from the checkpoint");
  sweep->add_flag("--allow-even-q", sw_even, "permit even q");

  auto* fit = app.add_subcommand("fit", "fit log(abs_error) against log(q)");
  std::string fit_in, fit_out;
  fit->add_option("input", fit_in, "JSON-lines file written by sweep")->required();
  fit->add_option("--out", fit_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (count->parsed()) return run_count(count_o);
    if (estimate->parsed()) return run_estimate(est_o);
    if (cr->parsed()) return run_cr(cr_o);
    if (cycles->parsed()) return run_cycles(cyc_o);
    if (sweep->parsed()) {
      fqhl::SweepConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw fqhl::IoError("cannot read config " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = fqhl::parse_config_text(ss.str());
      }
      if (sweep->count("--field")) cfg.fields = fqhl::split_poly_list(fields_csv);
      if (sweep->count("--grid")) cfg.fields = fqhl::parse_config_text("grid = " + grid).fields;
      if (sweep->count("--n")) cfg.n = sw_n;
      if (sweep->count("--offsets")) cfg.offsets = sweep_offsets;
      if (sweep->count("--mode")) cfg.mode = fqhl::parse_sweep_mode(mode);
      if (sweep->count("--samples")) cfg.samples = sw_samples;
      if (sweep->count("--seed")) cfg.seed = sw_seed;
      if (sweep->count("--shards")) cfg.shards = sw_shards;
      if (sweep->count("--budget")) cfg.budget = sw_budget;
      if (sweep->count("--threads")) cfg.threads = threads;
      if (sweep->count("--out")) cfg.out = out;
      if (sweep->count("--csv")) cfg.csv = csv;
      if (sweep->count("--checkpoint")) cfg.checkpoint = checkpoint;
      if (sw_even) cfg.allow_even_q = true;
      fqhl::SweepControl ctl;
      ctl.resume = resume;
      const auto res = fqhl::run_sweep(cfg, ctl);
      if (cfg.out.empty()) {
        for (const auto& r : res.rows) std::cout << fqhl::to_json(r).dump() << '\n';
      }
      for (const auto& e : res.io_errors) std::cerr << "I/O error: " << e << '\n';
      return res.io_errors.empty() ? 0 : kExitIo;
    }
    if (fit->parsed()) {
      const auto f = fqhl::fit_error_exponent(read_count_rows(fit_in));
      fqhl::json j{{"slope", f.slope}, {"intercept", f.intercept}, {"points", f.points}, {"excluded", f.excluded}};
      if (fit_out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::ofstream o(fit_out, std::ios::trunc);
        if (!o || !(o << j.dump(2) << '\n')) throw fqhl::IoError("cannot write " + fit_out);
      }
      return 0;
    }
  } catch (const fqhl::BudgetError& e) {
    std::cerr << "budget refusal: " << e.what() << '\n';
    return kExitBudget;
  } catch (const fqhl::IoError& e) {
    std::cerr << "I/O failure: " << e.what() << '\n';
    return kExitIo;
  } catch (const fqhl::Error& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fqhl::json::exception& e) {
    std::cerr << "validation failure: malformed JSON: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
