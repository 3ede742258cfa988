#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "fqhl/fqhl.hpp"

using namespace fqhl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows only, without the metadata header.
std::string body(const std::string& jsonl) { return jsonl.substr(jsonl.find('\n') + 1); }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("fqhl_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

SweepConfig small_exact() {
  SweepConfig c;
  c.fields = {"3", "5", "7", "9", "11"};
  c.n = 2;
  c.offsets = "0,1";
  c.mode = SweepMode::kExact;
  return c;
}

CountResult synthetic(u64 q, double err) {
  CountResult r;
  r.field = parse_field(std::to_string(q)).label();
  r.n = 2;
  r.offsets = {"0", "1"};
  r.abs_error = err;
  return r;
}

}  // namespace

TEST(Sweep, ExactGridRows) {
  const auto res = run_sweep(small_exact());
  ASSERT_EQ(res.rows.size(), 5u);
  const auto rows = res.count_rows();
  EXPECT_EQ(rows[0].field, "3");
  EXPECT_EQ(rows[0].hits, 0u);
  EXPECT_EQ(rows[1].hits, 5u);
  EXPECT_EQ(rows[3].field, "3^2");
  for (const auto& r : rows) {
    const auto direct = pi_exact(make_tuple_spec(r.field, 2, "0,1"));
    EXPECT_EQ(r.hits, direct.hits);
    EXPECT_EQ(r.config_digest, direct.config_digest);
  }
  EXPECT_TRUE(res.complete);
}

TEST(Sweep, EvenQAbortsBeforeWork) {
  TempDir dir;
  auto c = small_exact();
  c.fields = {"3", "2^2"};
  c.out = (dir / "rows.jsonl").string();
  try {
    run_sweep(c);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("even q"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir / "rows.jsonl"));
  c.allow_even_q = true;
  const auto rows = run_sweep(c).count_rows();
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[1].outside_hypotheses);
}

TEST(Sweep, EmptyGrid) {
  SweepConfig c;
  const auto res = run_sweep(c);
  EXPECT_TRUE(res.rows.empty());
  EXPECT_TRUE(res.complete);
}

TEST(Sweep, BudgetRefusal) {
  auto c = small_exact();
  c.budget = 100;
  EXPECT_THROW(run_sweep(c), BudgetError);
  c.budget = 121;
  EXPECT_NO_THROW(run_sweep(c));
}

TEST(Sweep, ShardCountAndThreadIndependence) {
  TempDir dir;
  for (SweepMode mode : {SweepMode::kExact, SweepMode::kSample, SweepMode::kCR, SweepMode::kCycles}) {
    std::string reference;
    for (u64 shards : {1u, 2u, 8u}) {
      for (unsigned threads : {1u, 4u}) {
        SweepConfig c;
        c.fields = {"3", "5", "7", "9", "11", "13"};
        c.n = 3;
        c.mode = mode;
        c.samples = 3000;
        c.seed = 77;
        c.shards = shards;
        c.threads = threads;
        c.out = (dir / "rows.jsonl").string();
        SweepControl ctl;
        ctl.chunk = 97;
        run_sweep(c, ctl);
        const std::string b = body(slurp(c.out));
        if (reference.empty()) reference = b;
        EXPECT_EQ(b, reference) << to_string(mode) << " shards=" << shards << " threads=" << threads;
      }
    }
  }
}

TEST(Sweep, RerunIsByteIdentical) {
  TempDir dir;
  auto c = small_exact();
  c.out = (dir / "a.jsonl").string();
  c.csv = (dir / "a.csv").string();
  run_sweep(c);
  const auto first = slurp(c.out), first_csv = slurp(c.csv);
  run_sweep(c);
  EXPECT_EQ(slurp(c.out), first);
  EXPECT_EQ(slurp(c.csv), first_csv);
  EXPECT_EQ(first_csv.substr(0, first_csv.find('\n')).find("kind,field,n,offsets,mode,pi,prediction"), 0u);
}

TEST(Sweep, InterruptAndResumeIsByteIdentical) {
  TempDir dir;
  SweepConfig c;
  c.fields = {"3", "5", "7", "9", "11", "13"};
  c.n = 3;
  c.shards = 4;
  c.out = (dir / "full.jsonl").string();
  c.csv = (dir / "full.csv").string();
  run_sweep(c);
  const auto full = slurp(c.out), full_csv = slurp(c.csv);

  c.out = (dir / "part.jsonl").string();
  c.csv = (dir / "part.csv").string();
  c.checkpoint = (dir / "ck.json").string();
  SweepControl ctl;
  ctl.chunk = 50;
  ctl.stop_after_tests = 2000;  // about half of the 4 389 tests
  ctl.resume = true;
  const auto part = run_sweep(c, ctl);
  EXPECT_FALSE(part.complete);
  EXPECT_LT(part.rows.size(), 6u);
  EXPECT_FALSE(fs::exists(c.csv));
  ASSERT_TRUE(fs::exists(c.checkpoint));

  ctl.stop_after_tests.reset();
  const auto done = run_sweep(c, ctl);
  EXPECT_TRUE(done.complete);
  EXPECT_EQ(slurp(c.out), full);
  EXPECT_EQ(slurp(c.csv), full_csv);

  // Resuming a completed run does nothing and rewrites the same output.
  const auto again = run_sweep(c, ctl);
  EXPECT_TRUE(again.complete);
  EXPECT_EQ(slurp(c.out), full);
}

TEST(Sweep, ResumeRefusesDifferentConfig) {
  TempDir dir;
  SweepConfig c = small_exact();
  c.checkpoint = (dir / "ck.json").string();
  SweepControl ctl;
  ctl.resume = true;
  ctl.stop_after_tests = 10;
  ctl.chunk = 5;
  run_sweep(c, ctl);
  c.offsets = "0,2";
  EXPECT_THROW(run_sweep(c, ctl), CheckpointMismatch);
}

TEST(Sweep, IoFailureIsReportedAndSweepContinues) {
  auto c = small_exact();
  c.out = "/nonexistent-dir/rows.jsonl";
  c.csv = "/nonexistent-dir/rows.csv";
  const auto res = run_sweep(c);
  EXPECT_EQ(res.rows.size(), 5u);
  EXPECT_EQ(res.io_errors.size(), 2u);
}

TEST(Config, DigestIgnoresPathsAndThreads) {
  auto a = small_exact(), b = small_exact();
  b.out = "x";
  b.threads = 8;
  b.budget = 5;
  EXPECT_EQ(a.digest(), b.digest());
  b.offsets = "0, 1";
  EXPECT_EQ(a.digest(), b.digest());
  b.offsets = "1,0";
  EXPECT_NE(a.digest(), b.digest());
}

TEST(Config, ParseText) {
  const auto c = parse_config_text(
      "# sweep\n"
      "grid = odd-prime-powers:3:30\n"
      "n = 3\n"
      "offsets = 0, t+1\n"
      "mode = sample\n"
      "samples = 500\n"
      "seed = 9\n"
      "shards = 2\n");
  EXPECT_EQ(c.fields, (std::vector<std::string>{"3", "5", "7", "3^2", "11", "13", "17", "19", "23", "5^2", "3^3",
                                                "29"}));
  EXPECT_EQ(c.n, 3u);
  EXPECT_EQ(c.offsets, "0, t+1");
  EXPECT_EQ(c.mode, SweepMode::kSample);
  EXPECT_EQ(c.samples, 500u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.shards, 2u);
  EXPECT_THROW(parse_config_text("bogus = 1\n"), ValidationError);
  EXPECT_THROW(parse_config_text("n = x\n"), ValidationError);
  EXPECT_THROW(parse_config_text("no equals sign\n"), ValidationError);
}

TEST(Fit, SyntheticSlope) {
  std::vector<CountResult> rows;
  for (u64 q : {3, 5, 7, 9, 11, 13, 25, 27, 101}) rows.push_back(synthetic(q, 0.7 * std::pow(q, 1.5)));
  const auto fit = fit_error_exponent(rows);
  EXPECT_NEAR(fit.slope, 1.5, 1e-9);
  EXPECT_NEAR(fit.intercept, std::log(0.7), 1e-9);
  EXPECT_EQ(fit.points, 9u);
  EXPECT_EQ(fit.excluded, 0u);
}

TEST(Fit, ZeroErrorRowsAreExcluded) {
  std::vector<CountResult> rows;
  for (u64 q : {3, 5, 7, 11, 13}) rows.push_back(synthetic(q, std::pow(q, 1.2)));
  rows.push_back(synthetic(17, 0.0));
  const auto fit = fit_error_exponent(rows);
  EXPECT_EQ(fit.excluded, 1u);
  EXPECT_NEAR(fit.slope, 1.2, 1e-9);

  std::vector<CountResult> zeros;
  for (u64 q : {3, 5, 7, 11, 13}) zeros.push_back(synthetic(q, 0.0));
  EXPECT_THROW(fit_error_exponent(zeros), ValidationError);
  rows.resize(3);
  EXPECT_THROW(fit_error_exponent(rows), ValidationError);
}

TEST(Fit, RowOrderInvariant) {
  std::vector<CountResult> rows;
  CounterStream rng(1, 1);
  for (u64 q : {3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31}) {
    rows.push_back(synthetic(q, std::pow(q, 1.4) * (0.5 + static_cast<double>(rng.below(1000)) / 1000)));
  }
  const auto ref = fit_error_exponent(rows);
  for (int i = 0; i < 20; ++i) {
    for (std::size_t j = rows.size(); j > 1; --j) std::swap(rows[j - 1], rows[rng.below(j)]);
    const auto f = fit_error_exponent(rows);
    EXPECT_EQ(f.slope, ref.slope);
    EXPECT_EQ(f.intercept, ref.intercept);
  }
}

TEST(Fit, RejectsMixedShapes) {
  std::vector<CountResult> rows;
  for (u64 q : {3, 5, 7, 11}) rows.push_back(synthetic(q, 1.0 * q));
  rows[2].n = 3;
  EXPECT_THROW(fit_error_exponent(rows), ValidationError);
}

TEST(Records, CountJsonFields) {
  const auto r = pi_exact(make_tuple_spec("5", 2, "0,1"));
  const json j = to_json(r);
  EXPECT_EQ(j["kind"], "count");
  EXPECT_EQ(j["field"], "5");
  EXPECT_EQ(j["offsets"], (json{"0", "1"}));
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_EQ(j["prediction"], "25/4");
  EXPECT_EQ(j["shard"], "0/1");
  EXPECT_TRUE(j["sample_size"].is_null());
  EXPECT_TRUE(j["ci_half_width"].is_null());
  const json s = to_json(pi_sample(make_tuple_spec("5", 2, "0,1"), 100, 3));
  EXPECT_EQ(s["mode"], "sampled");
  EXPECT_EQ(s["sample_size"], 100);
  EXPECT_EQ(s["seed"], 3);
}

TEST(Records, CycleStatsRoundTrip) {
  const auto stats = joint_cycle_sample(make_tuple_spec("13", 3, "0,1"), 2000, 4);
  const auto back = stats_from_json(stats_json(stats));
  EXPECT_EQ(back.counts, stats.counts);
  EXPECT_EQ(back.total, stats.total);
  EXPECT_EQ(back.discarded, stats.discarded);
}

TEST(Records, CsvEscaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

#ifdef FQHL_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const int status = std::system((std::string(FQHL_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_cli("count --field 5 --n 2 --offsets 0,1"), 0);
  EXPECT_EQ(run_cli("count --field 4 --n 2 --offsets 0,1"), 2);
  EXPECT_EQ(run_cli("count --field 5 --n 2 --offsets 0,0"), 2);
  EXPECT_EQ(run_cli("count --field 5 --n 2 --offsets 't^^2'"), 2);
  EXPECT_EQ(run_cli("count --field 101 --n 4 --offsets 0,1"), 3);
  EXPECT_EQ(run_cli("count --field 5 --n 2 --offsets 0,1 --out /nonexistent-dir/x.json"), 4);
  EXPECT_EQ(run_cli("estimate --field 101 --n 3 --offsets 0,1 --samples 1000"), 0);
  EXPECT_EQ(run_cli("cr-density --field 5 --n 2 --offsets 0,t"), 0);
  EXPECT_EQ(run_cli("cycle-stats --field 31 --n 3 --offsets 0,1 --samples 500"), 0);
  EXPECT_EQ(run_cli("sweep --grid odd-prime-powers:3:11 --n 2 --offsets 0,1 --out " + (dir / "s.jsonl").string()), 0);
  EXPECT_EQ(run_cli("fit " + (dir / "s.jsonl").string()), 0);
  EXPECT_EQ(run_cli("fit " + (dir / "missing.jsonl").string()), 4);
  EXPECT_EQ(run_cli("sweep --field 3,2^2 --n 2"), 2);
  EXPECT_EQ(run_cli("sweep --config " + (dir / "missing.cfg").string()), 4);
}
#endif
