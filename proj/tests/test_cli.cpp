// Tests for the command-line front end: strict config parsing, the exit-code
// contract (0 all-pass, 1 certification failure, 2 usage error, 3 flagged),
// CSV/JSON schemas, and byte-level determinism of reruns.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ksgas/cli.hpp"
#include "ksgas/config.hpp"

using namespace ksgas;
using namespace ksgas::cli;
using njson = nlohmann::ordered_json;

namespace {

RunConfig config_from(const njson& j) { return parse_config(j); }

njson tonks_json() {
  return njson{{"potential", {{"kind", "hard_rod"}, {"diameter", 1.0}}},
               {"thermo", {{"drive", {{"kind", "density"}, {"value", 0.2}}}}},
               {"mayer", {{"n", 2}, {"grid", {{"x_min", 1.0}, {"x_max", 3.0}, {"points", 5}}}}}};
}

njson soft_json() {
  return njson{
      {"potential", {{"kind", "soft_core"}, {"diameter", 1.0}, {"sharpness", 0.05}}},
      {"thermo", {{"beta", 1.0}, {"drive", {{"kind", "activity"}, {"value", 0.05}}}}},
      {"mayer", {{"order", 2}, {"n", 2}, {"grid", {{"x_min", 0.5}, {"x_max", 2.0}, {"points", 3}}}}}};
}

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::string& name, const RunConfig& cfg) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_command(name, cfg, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

int fields(const std::string& row) {
  int n = 1;
  for (char c : row) n += (c == ',');
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

TEST(ConfigParsing, RejectsUnknownKeysInEveryBlock) {
  njson top = tonks_json();
  top["extra"] = 1;
  EXPECT_THROW(config_from(top), ConfigError);

  njson thermo = tonks_json();
  thermo["thermo"]["bogus"] = 3;
  EXPECT_THROW(config_from(thermo), ConfigError);

  njson pot = tonks_json();
  pot["potential"]["sharpness"] = 0.1;  // not a hard_rod parameter
  EXPECT_THROW(config_from(pot), ConfigError);

  njson quad = soft_json();
  quad["quad"] = {{"abs_tol", 1e-9}, {"mystery", 2}};
  EXPECT_THROW(config_from(quad), ConfigError);

  njson grid = soft_json();
  grid["mayer"]["grid"]["step"] = 0.5;
  EXPECT_THROW(config_from(grid), ConfigError);

  njson res = soft_json();
  res["residuals"] = {{"tolerance", 1e-6}};
  EXPECT_THROW(config_from(res), ConfigError);
}

TEST(ConfigParsing, ValidatesPositivityAndRanges) {
  njson beta = soft_json();
  beta["thermo"]["beta"] = -1.0;
  EXPECT_THROW(config_from(beta), ConfigError);

  njson nu = soft_json();
  nu["thermo"]["nu"] = 4;
  EXPECT_THROW(config_from(nu), ConfigError);

  njson drive = soft_json();
  drive["thermo"]["drive"]["value"] = 0.0;
  EXPECT_THROW(config_from(drive), ConfigError);

  njson kind = soft_json();
  kind["thermo"]["drive"]["kind"] = "pressure";
  EXPECT_THROW(config_from(kind), ConfigError);

  njson points = soft_json();
  points["mayer"]["grid"]["points"] = 0;
  EXPECT_THROW(config_from(points), ConfigError);

  njson order = soft_json();
  order["mayer"]["grid"] = {{"x_min", 2.0}, {"x_max", 1.0}};
  EXPECT_THROW(config_from(order), ConfigError);

  njson missing = njson{{"thermo", {{"beta", 1.0}}}};
  EXPECT_THROW(config_from(missing), ConfigError);

  njson eps = soft_json();
  eps["hclimit"] = {{"epsilons", {0.2, -0.1}}};
  EXPECT_THROW(config_from(eps), ConfigError);
}

TEST(ConfigParsing, AppliesDocumentedDefaults) {
  const RunConfig cfg = config_from(njson{{"potential", {{"kind", "soft_core"}}}});
  EXPECT_EQ(cfg.kind, PotentialKind::soft_core);
  EXPECT_DOUBLE_EQ(cfg.diameter, 1.0);
  EXPECT_DOUBLE_EQ(cfg.sharpness, 0.05);
  EXPECT_DOUBLE_EQ(cfg.thermo.beta, 1.0);
  EXPECT_EQ(cfg.thermo.nu, 1);
  EXPECT_FALSE(cfg.drive.is_density);
  EXPECT_DOUBLE_EQ(cfg.drive.value, 0.05);
  EXPECT_EQ(cfg.mayer.order, 3);
  EXPECT_EQ(cfg.mayer.n, 2);
  EXPECT_EQ(cfg.mayer.grid.points, 5);
  EXPECT_EQ(cfg.hclimit.epsilons, (std::vector<double>{0.2, 0.1, 0.05}));
  EXPECT_FALSE(cfg.residuals.suite_given);
}

// ---------------------------------------------------------------------------
// tabulate
// ---------------------------------------------------------------------------

TEST(Tabulate, TonksPresetEmitsOneRowPerGridPoint) {
  const RunResult r = run("tabulate", config_from(tonks_json()));
  EXPECT_EQ(r.code, 0);
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& row : rows) EXPECT_EQ(fields(row), 5);
  // First grid point is the contact value rho2(d) = rho^2 / (1 - rho d) = 0.05.
  double x = 0, v = 0;
  ASSERT_EQ(std::sscanf(rows.front().c_str(), "%lf,%lf", &x, &v), 2);
  EXPECT_DOUBLE_EQ(x, 1.0);
  EXPECT_NEAR(v, 0.05, 1e-15);
  // The unit-convention comment is part of the header contract.
  EXPECT_NE(r.out.find("# units: reduced"), std::string::npos);
  EXPECT_NE(r.out.find("# columns: x,rho_n,tail,quad,radius_ok"), std::string::npos);
}

TEST(Tabulate, FlagsActivityOutsideTheProvenRadius) {
  njson j = soft_json();
  j["thermo"]["drive"]["value"] = 0.9;  // far beyond 1/(I e)
  j["mayer"] = {{"order", 2}, {"n", 1}, {"grid", {{"x_min", 1.0}, {"x_max", 1.0}, {"points", 2}}}};
  const RunResult r = run("tabulate", config_from(j));
  EXPECT_EQ(r.code, 3);
  for (const auto& row : data_rows(r.out)) {
    EXPECT_EQ(fields(row), 5);
    EXPECT_EQ(row.substr(row.size() - 2), ",0") << row;
  }
}

TEST(Tabulate, ReRunsAreByteIdentical) {
  const RunConfig cfg = config_from(tonks_json());
  const RunResult a = run("tabulate", cfg);
  const RunResult b = run("tabulate", cfg);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);

  const RunConfig soft = config_from(soft_json());
  EXPECT_EQ(run("tabulate", soft).out, run("tabulate", soft).out);
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

TEST(Certify, TonksSuitePassesEndToEnd) {
  const RunResult r = run("certify", config_from(tonks_json()));
  EXPECT_EQ(r.code, 0);
  const njson j = njson::parse(r.out);
  EXPECT_TRUE(j.at("all_pass").get<bool>());
  EXPECT_EQ(j.at("evaluator"), "tonks_hard_rod");
  const auto& reports = j.at("reports");
  ASSERT_GE(reports.size(), 8u);  // hierarchy, constant, hard-core KS, KS, activity
  for (const auto& rep : reports) EXPECT_TRUE(rep.at("pass").get<bool>()) << rep.dump();
}

TEST(Certify, CorruptedActivityFailsTheKirkwoodSalsburgCheck) {
  njson j = tonks_json();
  j["residuals"] = {{"z_scale", 1.5}};
  const RunResult r = run("certify", config_from(j));
  EXPECT_EQ(r.code, 1);
  const njson rep = njson::parse(r.out);
  EXPECT_FALSE(rep.at("all_pass").get<bool>());
  bool ks_failed = false, hierarchy_passed = true;
  for (const auto& item : rep.at("reports")) {
    if (item.at("equation") == "KS" && !item.at("pass").get<bool>()) ks_failed = true;
    // The positional hierarchy never involves the activity, so the
    // corruption must leave it green.
    if (item.at("equation") == "hardrod_hierarchy")
      hierarchy_passed = hierarchy_passed && item.at("pass").get<bool>();
  }
  EXPECT_TRUE(ks_failed);
  EXPECT_TRUE(hierarchy_passed);
}

TEST(Certify, EmptySuiteSelectionIsAUsageError) {
  njson j = tonks_json();
  j["residuals"] = {{"suite", njson::array()}};
  EXPECT_THROW(run("certify", config_from(j)), ConfigError);

  njson unknown = tonks_json();
  unknown["residuals"] = {{"suite", {"ks", "carnival"}}};
  EXPECT_THROW(run("certify", config_from(unknown)), ConfigError);

  njson mismatch = soft_json();
  mismatch["residuals"] = {{"suite", {"hardrod"}}};
  EXPECT_THROW(run("certify", config_from(mismatch)), ConfigError);
}

TEST(Certify, IdealGasFullSmoothSuiteIsExact) {
  njson j = njson{{"potential", {{"kind", "ideal"}}},
                  {"thermo", {{"drive", {{"kind", "activity"}, {"value", 0.3}}}}},
                  {"residuals",
                   {{"suite", {"ks", "symmetric", "bbgky", "bogolyubov", "activity"}},
                    {"draws", 2}}}};
  const RunResult r = run("certify", config_from(j));
  EXPECT_EQ(r.code, 0);
  const njson rep = njson::parse(r.out);
  EXPECT_TRUE(rep.at("all_pass").get<bool>());
  EXPECT_EQ(rep.at("reports").size(), 8u);  // 2 KS + 2 symmetric + 1 bbgky + 2 draws + activity
}

// ---------------------------------------------------------------------------
// invert / hardrod / bounds
// ---------------------------------------------------------------------------

TEST(Invert, RecoversTheTonksActivityWithinBudget) {
  const RunResult r = run("invert", config_from(tonks_json()));
  EXPECT_EQ(r.code, 0);
  const njson j = njson::parse(r.out);
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_NEAR(j.at("z_recovered").get<double>(), 0.25 * std::exp(0.25), 1e-13);
  EXPECT_GT(j.at("denominator").get<double>(), 0.5);
}

TEST(Invert, NewtonAndInsertionRoutesAgreeForTheSeries) {
  const RunResult r = run("invert", config_from(soft_json()));
  EXPECT_EQ(r.code, 0);
  const njson j = njson::parse(r.out);
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_NEAR(j.at("z_newton").get<double>(), 0.05, 1e-10);
  EXPECT_LE(std::abs(j.at("z_recovered").get<double>() - 0.05), j.at("budget").get<double>());
}

TEST(Hardrod, EmitsConstantsAndRequiresTheHardRodPotential) {
  const RunResult r = run("hardrod", config_from(tonks_json()));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# R=0.25;"), std::string::npos);
  EXPECT_EQ(data_rows(r.out).size(), 5u);

  EXPECT_THROW(run("hardrod", config_from(soft_json())), ConfigError);
}

TEST(Bounds, EmitsEnvelopesAndFlagsOutOfRadiusStates) {
  const RunResult soft = run("bounds", config_from(soft_json()));
  EXPECT_EQ(soft.code, 0);
  const njson js = njson::parse(soft.out);
  EXPECT_TRUE(js.at("radius_ok").get<bool>());
  EXPECT_NEAR(js.at("i_beta").at("upper").get<double>(), 1.7869354739449157, 1e-6);
  EXPECT_TRUE(js.at("iteration_tail").is_array());

  // The Tonks state at rho = 0.2 has z = 0.321 > 1/(2 e): flagged, not failed.
  const RunResult hard = run("bounds", config_from(tonks_json()));
  EXPECT_EQ(hard.code, 3);
  const njson jh = njson::parse(hard.out);
  EXPECT_FALSE(jh.at("radius_ok").get<bool>());
  EXPECT_DOUBLE_EQ(jh.at("i_beta").at("value").get<double>(), 2.0);
  EXPECT_TRUE(jh.at("iteration_tail").is_null());
}

// ---------------------------------------------------------------------------
// hclimit
// ---------------------------------------------------------------------------

namespace {

njson hclimit_json() {
  return njson{
      {"potential", {{"kind", "soft_core"}, {"diameter", 1.0}, {"sharpness", 0.05}}},
      {"thermo", {{"beta", 600.0}, {"drive", {{"kind", "activity"}, {"value", 0.005}}}}},
      {"mayer", {{"order", 2}}},
      {"hclimit", {{"epsilons", {0.2}}, {"grid", {{"x_min", 1.1}, {"x_max", 2.0}, {"points", 2}}}}}};
}

}  // namespace

TEST(Hclimit, SingleSharpnessProducesOneSummaryRow) {
  const RunResult r = run("hclimit", config_from(hclimit_json()));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(data_rows(r.out).size(), 2u);  // one per grid point
  const njson summary = njson::parse(r.err);
  ASSERT_EQ(summary.at("rows").size(), 1u);
  EXPECT_TRUE(summary.at("rows")[0].at("radius_ok").get<bool>());
  EXPECT_TRUE(summary.at("empirical_rate").is_null());  // needs two sharpness values
  EXPECT_TRUE(summary.at("all_radius_ok").get<bool>());
}

TEST(Hclimit, FixedDensityModeAddsThePerSharpnessActivityColumn) {
  njson j = hclimit_json();
  j["thermo"]["drive"] = {{"kind", "density"}, {"value", 0.004}};
  const RunResult r = run("hclimit", config_from(j));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(",z_eps\n"), std::string::npos);
  for (const auto& row : data_rows(r.out)) EXPECT_EQ(fields(row), 7);
  const njson summary = njson::parse(r.err);
  EXPECT_EQ(summary.at("drive"), "density");
  EXPECT_GT(summary.at("rows")[0].at("z_used").get<double>(), 0.004);
}

TEST(Hclimit, RequiresTheSoftCoreFamilyOnTheLine) {
  EXPECT_THROW(run("hclimit", config_from(tonks_json())), ConfigError);

  njson planar = hclimit_json();
  planar["thermo"]["nu"] = 2;
  EXPECT_THROW(run("hclimit", config_from(planar)), ConfigError);

  njson increasing = hclimit_json();
  increasing["hclimit"]["epsilons"] = {0.1, 0.2};
  EXPECT_THROW(run("hclimit", config_from(increasing)), ConfigError);
}

TEST(Hclimit, WritesTheSummaryWhereConfigured) {
  const std::string path = testing::TempDir() + "ksgas_summary_test.json";
  std::remove(path.c_str());
  njson j = hclimit_json();
  j["output"] = {{"summary", path}};
  const RunResult r = run("hclimit", config_from(j));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.err.empty());
  std::ifstream in(path);
  ASSERT_TRUE(in.good());
  const njson summary = njson::parse(in);
  EXPECT_EQ(summary.at("command"), "hclimit");
  std::remove(path.c_str());
}

TEST(Hclimit, ReRunsAreByteIdentical) {
  const RunConfig cfg = config_from(hclimit_json());
  const RunResult a = run("hclimit", cfg);
  const RunResult b = run("hclimit", cfg);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
}

// ---------------------------------------------------------------------------
// Environment and process-level contract
// ---------------------------------------------------------------------------

TEST(ThreadEnv, ParsesAndValidatesTheWorkerCount) {
  unsetenv("KSGAS_THREADS");
  EXPECT_EQ(thread_count_from_env(), 1);
  setenv("KSGAS_THREADS", "3", 1);
  EXPECT_EQ(thread_count_from_env(), 3);
  setenv("KSGAS_THREADS", "0", 1);
  EXPECT_THROW(thread_count_from_env(), ConfigError);
  setenv("KSGAS_THREADS", "many", 1);
  EXPECT_THROW(thread_count_from_env(), ConfigError);
  unsetenv("KSGAS_THREADS");
}

TEST(Hclimit, WorkerThreadsDoNotChangeTheBytes) {
  njson j = hclimit_json();
  j["hclimit"]["epsilons"] = {0.2, 0.1};
  const RunConfig cfg = config_from(j);
  unsetenv("KSGAS_THREADS");
  const RunResult serial = run("hclimit", cfg);
  setenv("KSGAS_THREADS", "2", 1);
  const RunResult threaded = run("hclimit", cfg);
  unsetenv("KSGAS_THREADS");
  EXPECT_EQ(serial.out, threaded.out);
  EXPECT_EQ(serial.err, threaded.err);
  EXPECT_EQ(serial.code, threaded.code);
}

namespace {

int run_binary(const std::string& args) {
  const int status = std::system((std::string(KSGAS_CLI_PATH) + " " + args).c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(MainBinary, MapsTheExitCodeContract) {
  const std::string dir = testing::TempDir();
  const std::string cfg_path = dir + "ksgas_cli_test.json";
  const std::string out_path = dir + "ksgas_cli_test.csv";
  {
    std::ofstream f(cfg_path);
    f << tonks_json().dump();
  }

  EXPECT_EQ(run_binary("tabulate " + cfg_path + " > " + out_path + " 2>/dev/null"), 0);
  {
    std::ifstream in(out_path);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "# ksgas tabulate");
  }
  EXPECT_EQ(run_binary("certify " + cfg_path + " >/dev/null 2>&1"), 0);
  EXPECT_EQ(run_binary(">/dev/null 2>&1"), 2);                             // no subcommand
  EXPECT_EQ(run_binary("frobnicate " + cfg_path + " >/dev/null 2>&1"), 2); // unknown subcommand
  EXPECT_EQ(run_binary("tabulate /no/such/file.json >/dev/null 2>&1"), 2); // unreadable config
  EXPECT_EQ(run_binary("--help >/dev/null 2>&1"), 0);

  std::remove(cfg_path.c_str());
  std::remove(out_path.c_str());
}
