#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "lgi/cli.hpp"

using namespace lgi;
using namespace lgi::cli;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(LGI_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("theta and duration parsing") {
  CHECK(parse_theta("0.416pi") == doctest::Approx(0.416 * kPi));
  CHECK(parse_theta("0.5*pi") == doctest::Approx(kPi / 2));
  CHECK(parse_theta("pi") == doctest::Approx(kPi));
  CHECK(parse_theta("-pi") == doctest::Approx(-kPi));
  CHECK(parse_theta("1.25") == 1.25);
  CHECK_THROWS_AS(parse_theta("abc"), UsageError);
  CHECK_THROWS_AS(parse_theta("1.2x"), UsageError);
  CHECK(format_theta(0.416 * kPi) == "0.416pi");
  CHECK(parse_duration("62us") == doctest::Approx(62e-6));
  CHECK(parse_duration("1.5ms") == doctest::Approx(1.5e-3));
  CHECK(parse_duration("2e-6s") == doctest::Approx(2e-6));
  CHECK(parse_duration("3e-6") == doctest::Approx(3e-6));
  CHECK_THROWS_AS(parse_duration("5 parsecs"), UsageError);
  CHECK(parse_characterize_kind("cg-repeat") == CharacterizeKind::CgRepeat);
  CHECK_THROWS_AS(parse_characterize_kind("x"), UsageError);
}

TEST_CASE("config application") {
  const auto cfg = apply_config({}, json::parse(R"({
    "theta": "0.3pi", "scheme": "luders",
    "imperfections": {"t2_star": "40us", "pol_n": 0.9, "averaging": "montecarlo"},
    "simulation": {"cg_model": "square-pulse"},
    "characterize": {"kmax": 12}
  })"));
  CHECK(cfg.theta == doctest::Approx(0.3 * kPi));
  CHECK(cfg.rule == UpdateRule::Luders);
  CHECK(cfg.imperfections.t2_star_s == doctest::Approx(40e-6));
  CHECK(cfg.imperfections.pol_n == 0.9);
  CHECK(cfg.imperfections.pol_e == 0.95);
  CHECK(cfg.imperfections.averaging == Averaging::MonteCarlo);
  CHECK(cfg.simulation.cg == nv::CgModel::SquarePulse);
  CHECK(cfg.kmax == 12);

  CHECK_THROWS_AS(apply_config({}, json::parse(R"({"thetaa": 1})")), UsageError);
  CHECK_THROWS_AS(apply_config({}, json::parse(R"({"imperfections": {"pol": 1}})")), UsageError);
  CHECK_THROWS_AS(apply_config({}, json::parse(R"({"grid": "many"})")), UsageError);
  CHECK_THROWS_AS(apply_config({}, json::parse(R"({"scheme": "other"})")), UsageError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/run.json"), UsageError);
}

TEST_CASE("record and CSV round trips") {
  ResultRecord r;
  r.command = "nv";
  r.inputs = {{"theta", "0.416pi"}};
  r.outputs = {{"k3", 1.62}};
  r.provenance.seed = 42;
  const auto back = ResultRecord::from_json(json::parse(r.to_json().dump()));
  CHECK(back.to_json() == r.to_json());
  CHECK_FALSE(back.provenance.timestamp.has_value());
  auto j = r.to_json();
  j["extra"] = 1;
  CHECK_THROWS(ResultRecord::from_json(j));

  CsvTable t{{"a", "b"}, {{"1", "0.5"}, {"2", "1e-07"}}};
  std::ostringstream os;
  write_csv(os, t);
  const auto parsed = parse_csv(os.str());
  CHECK(parsed.header == t.header);
  CHECK(parsed.rows == t.rows);
  CHECK_THROWS(parse_csv("a,b\n1\n"));
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("seed resolution") {
  RunConfig cfg;
  cfg.seed = 5;
  CHECK(resolve_seed(cfg).seed == 5);
  cfg.seed.reset();
  setenv(kSeedEnv, "17", 1);
  CHECK(resolve_seed(cfg).seed == 17);
  setenv(kSeedEnv, "x", 1);
  CHECK_THROWS_AS(resolve_seed(cfg), UsageError);
  unsetenv(kSeedEnv);
  const auto p = resolve_seed(cfg);
  CHECK(p.seed_from_entropy);
  CHECK(p.timestamp.has_value());
}

TEST_CASE("commands in process") {
  RunConfig cfg;
  cfg.seed = 1;
  const auto ideal = cmd_ideal(cfg);
  CHECK(ideal.outputs["k3"].get<double>() == doctest::Approx(analytic_correlators(0.416 * kPi).k3));
  CHECK(ideal.outputs["violates_classical_bound"].get<bool>());

  cfg.n = 4;
  cfg.levels = 2;
  cfg.theta = kPi / 4;
  CHECK(cmd_ideal(cfg).outputs["kn"].get<double>() == doctest::Approx(2 * std::sqrt(2.0)));

  RunConfig nv;
  nv.seed = 1;
  nv.imperfections.flip_prob_p = 0.0;
  CHECK_THROWS_AS(cmd_nv(nv), NumericalFailure);
}

TEST_CASE("binary: fixed seed gives identical output") {
  const auto a = run_cli("nv --seed 7");
  const auto b = run_cli("nv --seed 7");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto k3 = json::parse(a.out)["outputs"]["k3"].get<double>();
  CHECK(k3 > 1.6);
  CHECK(k3 < 1.66);

  const auto c = run_cli("characterize cg-repeat --seed 3");
  const auto d = run_cli("characterize cg-repeat --seed 3");
  CHECK(c.out == d.out);
  const auto e = run_cli("--format csv characterize fid --seed 3");
  REQUIRE(e.code == 0);
  CHECK(e.out.rfind("t_s,p0\n", 0) == 0);
}

TEST_CASE("binary: environment seed") {
  setenv(kSeedEnv, "7", 1);
  const auto a = run_cli("nv");
  unsetenv(kSeedEnv);
  CHECK(a.out == run_cli("nv --seed 7").out);
}

TEST_CASE("binary: exit codes") {
  CHECK(run_cli("ideal --theta 0.416pi --seed 1").code == 0);
  CHECK(run_cli("ideal --sweep --grid 1000 --seed 1").code == 0);
  CHECK(run_cli("bogus").code == 1);
  CHECK(run_cli("ideal --theta nonsense").code == 1);
  CHECK(run_cli("ideal --levels 4 --seed 1").code == 1);
  CHECK(run_cli("--format xml ideal --seed 1").code == 1);
  CHECK(run_cli("nv --p 0 --seed 1").code == 2);
  CHECK(run_cli("characterize fid --t2star 62us --readout-sigma 0 --reference-detuning 0 --seed 1").code == 2);

  const std::string path = "lgi_test_config.json";
  std::ofstream(path) << R"({"imperfections": {"bogus": 1}})";
  CHECK(run_cli("--config " + path + " nv --seed 1").code == 1);
  std::ofstream(path) << R"({"theta": "0.416pi", "imperfections": {"pol_n": 0.99}})";
  const auto ok = run_cli("--config " + path + " nv --seed 1");
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["inputs"]["imperfections"]["pol_n"].get<double>() == 0.99);
  std::remove(path.c_str());
}
