#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "wbc/config.hpp"

#ifndef WBCSIM_BINARY
#error "tests need the simulator binary path"
#endif

using namespace wbc;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out, err;
};

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "wbcsim_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  fs::path out_file = dir / "_stdout.txt";
  fs::path err_file = dir / "_stderr.txt";
  std::string cmd = std::string(WBCSIM_BINARY) + " " + args + " > " + out_file.string() + " 2> " +
                    err_file.string();
  int rc = std::system(cmd.c_str());
  CliResult res;
  res.exit_code = rc == -1 ? -1 : WEXITSTATUS(rc);
  res.out = read_text_file(out_file.string());
  res.err = read_text_file(err_file.string());
  return res;
}

Json base_config(const fs::path& out_dir) {
  return Json{
      {"channel",
       Json{{"source", Json{{"joint_vx", {0.5, 0.0, 0.0, 0.5}}}},
            {"y1", Json{{"type", "bec"}, {"eps", 0.0}}},
            {"y2", Json{{"type", "bec"}, {"eps", 0.0}}},
            {"z", Json{{"type", "bec"}, {"eps", 0.5}}}}},
      {"n", 4},
      {"blocks", 2},
      {"beta", 0.3},
      {"seed", 11},
      {"construction", Json{{"method", "exact_bec"}}},
      {"trials", 10},
      {"estimator_samples", 2000},
      {"bootstrap_reps", 10},
      {"out_dir", out_dir.string()},
  };
}

fs::path write_config(const fs::path& dir, const Json& cfg, const char* name = "config.json") {
  fs::path path = dir / name;
  write_text_file(path.string(), cfg.dump(2));
  return path;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("construct reports the plan and freezes its artifacts") {
  fs::path dir = fresh_dir("construct");
  fs::path cache = dir / "cache";
  Json cfg = base_config(dir);
  cfg["sets_cache"] = cache.string();
  fs::path cfg_path = write_config(dir, cfg);

  CliResult first = run_cli("construct --config " + cfg_path.string(), dir);
  CHECK(first.exit_code == 0);
  CHECK(contains(first.out, "case "));
  CHECK(contains(first.out, "rates "));
  REQUIRE(fs::exists(dir / "construct.json"));
  std::string report1 = read_text_file((dir / "construct.json").string());
  Json parsed = Json::parse(report1);
  CHECK(parsed.contains("layout"));
  CHECK(parsed.contains("rates"));
  CHECK(parsed["corner_point"]["r_w"].get<double>() == doctest::Approx(0.5));

  CHECK(fs::exists(cache));
  CHECK(!fs::is_empty(cache));

  CliResult second = run_cli("construct --config " + cfg_path.string(), dir);
  CHECK(second.exit_code == 0);
  CHECK(read_text_file((dir / "construct.json").string()) == report1);
  CHECK(second.out == first.out);
}

TEST_CASE("invalid threshold exponent is a config error") {
  fs::path dir = fresh_dir("bad_beta");
  Json cfg = base_config(dir);
  cfg["beta"] = 0.6;
  fs::path cfg_path = write_config(dir, cfg);
  CliResult res = run_cli("construct --config " + cfg_path.string(), dir);
  CHECK(res.exit_code == 2);
  CHECK(contains(res.err, "(0, 1/2)"));
}

TEST_CASE("unknown suite names are rejected up front") {
  fs::path dir = fresh_dir("bad_suite");
  Json cfg = base_config(dir);
  cfg["suites"] = Json::array({"structure", "nonsense"});
  fs::path cfg_path = write_config(dir, cfg);
  CliResult res = run_cli("run --config " + cfg_path.string(), dir);
  CHECK(res.exit_code == 2);
  CHECK(contains(res.err, "nonsense"));
}

TEST_CASE("encode then decode round-trips over clean channels") {
  fs::path dir = fresh_dir("encode_decode");
  fs::path cfg_path = write_config(dir, base_config(dir));

  CliResult enc = run_cli("encode --config " + cfg_path.string(), dir);
  CHECK(enc.exit_code == 0);
  CHECK(contains(enc.out, "bits/block"));
  REQUIRE(fs::exists(dir / "session.json"));
  REQUIRE(fs::exists(dir / "observations.json"));

  CliResult dec = run_cli("decode --config " + cfg_path.string(), dir);
  CHECK(dec.exit_code == 0);
  CHECK(contains(dec.out, "rx1 match"));
  CHECK(contains(dec.out, "rx2 match"));
  Json report = Json::parse(read_text_file((dir / "decode_report.json").string()));
  CHECK(report["rx1_match"].get<bool>());
  CHECK(report["rx2_match"].get<bool>());

  SUBCASE("a tampered artifact is reported, not crashed on") {
    fs::path sp = dir / "session.json";
    Json art = Json::parse(read_text_file(sp.string()));
    int bit = art["messages"]["w"][0][0].get<int>();
    art["messages"]["w"][0][0] = 1 - bit;
    write_text_file(sp.string(), art.dump(2));

    CliResult bad = run_cli("decode --config " + cfg_path.string(), dir);
    CHECK(bad.exit_code == 0);
    CHECK(contains(bad.out, "MISMATCH"));
    Json bad_report = Json::parse(read_text_file((dir / "decode_report.json").string()));
    CHECK(!bad_report["rx1_match"].get<bool>());
  }

  SUBCASE("a session from another shape is refused") {
    Json other = base_config(dir);
    other["blocks"] = 3;
    fs::path other_path = write_config(dir, other, "config3.json");
    CliResult res = run_cli("decode --config " + other_path.string(), dir);
    CHECK(res.exit_code == 2);
    CHECK(contains(res.err, "different"));
  }
}

TEST_CASE("seed override changes the session artifact") {
  fs::path dir = fresh_dir("seed_override");
  fs::path cfg_path = write_config(dir, base_config(dir));
  CliResult enc = run_cli("encode --config " + cfg_path.string() + " --seed 99", dir);
  CHECK(enc.exit_code == 0);
  Json art = Json::parse(read_text_file((dir / "session.json").string()));
  CHECK(art["seed"].get<uint64_t>() == 99);
}

TEST_CASE("the evaluation suites pass and reproduce byte for byte") {
  fs::path dir = fresh_dir("run_suites");
  Json cfg = base_config(dir);
  cfg["suites"] = Json::array({"structure", "rates", "constants", "roundtrip", "secrecy", "tv"});
  fs::path cfg_path = write_config(dir, cfg);

  CliResult first = run_cli("run --config " + cfg_path.string(), dir);
  CHECK(first.exit_code == 0);
  for (const char* name : {"structure", "rates", "constants", "roundtrip", "secrecy", "tv"})
    CHECK(contains(first.out, std::string("suite ") + name));
  CHECK(!contains(first.out, "FAIL"));
  REQUIRE(fs::exists(dir / "run_report.json"));
  std::string report1 = read_text_file((dir / "run_report.json").string());

  Json parsed = Json::parse(report1);
  CHECK(parsed["suites"]["roundtrip"]["noiseless"].get<bool>());
  CHECK(parsed["suites"]["roundtrip"]["rx1_match"].get<bool>());
  CHECK(parsed["suites"]["secrecy"]["pass"].get<bool>());
  CHECK(parsed["suites"]["tv"]["tv"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));

  CliResult second = run_cli("run --config " + cfg_path.string(), dir);
  CHECK(second.exit_code == 0);
  CHECK(read_text_file((dir / "run_report.json").string()) == report1);

  CliResult rep = run_cli("report --config " + cfg_path.string(), dir);
  CHECK(rep.exit_code == 0);
  CHECK(contains(rep.out, "suite"));
  CHECK(contains(rep.out, "pass"));
}

TEST_CASE("suite flags override the configured list") {
  fs::path dir = fresh_dir("suite_flag");
  fs::path cfg_path = write_config(dir, base_config(dir));
  CliResult res = run_cli("run --config " + cfg_path.string() + " --suite constants", dir);
  CHECK(res.exit_code == 0);
  CHECK(contains(res.out, "suite constants"));
  CHECK(!contains(res.out, "suite structure"));
}

TEST_CASE("an undersampled entropy estimate fails the entropy suite") {
  fs::path dir = fresh_dir("entropy_fail");
  Json cfg = base_config(dir);
  cfg["channel"]["y1"] = Json{{"type", "bec"}, {"eps", 0.4}};
  cfg["channel"]["y2"] = Json{{"type", "bec"}, {"eps", 0.3}};
  cfg["channel"]["z"] = Json{{"type", "bec"}, {"eps", 0.7}};
  cfg["construction"] = Json{{"method", "monte_carlo"}, {"samples", 1}};
  cfg["suites"] = Json::array({"entropy"});
  fs::path cfg_path = write_config(dir, cfg);
  CliResult res = run_cli("run --config " + cfg_path.string(), dir);
  CHECK(res.exit_code == 3);
  CHECK(contains(res.out, "suite entropy"));
  CHECK(contains(res.out, "FAIL"));
  CHECK(contains(res.err, "entropy"));
}

TEST_CASE("exact secrecy checks over budget exit distinctly") {
  fs::path dir = fresh_dir("budget");
  Json cfg = base_config(dir);
  cfg["channel"]["y1"] = Json{{"type", "bec"}, {"eps", 0.4}};
  cfg["channel"]["y2"] = Json{{"type", "bec"}, {"eps", 0.3}};
  cfg["channel"]["z"] = Json{{"type", "bec"}, {"eps", 0.7}};
  cfg["n"] = 16;
  cfg["beta"] = 0.25;
  cfg["suites"] = Json::array({"secrecy"});
  fs::path cfg_path = write_config(dir, cfg);
  CliResult res = run_cli("run --config " + cfg_path.string(), dir);
  CHECK(res.exit_code == 4);
  CHECK(contains(res.err, "budget"));
}

TEST_CASE("config serialization is a fixed point") {
  fs::path dir = fresh_dir("config_identity");
  Json cfg = base_config(dir);
  cfg["channel"]["y1"] = Json{{"type", "identity"}};
  cfg["channel"]["y2"] = Json{{"type", "bsc"}, {"p", 0.0}};
  cfg["suites"] = Json::array({"structure", "rates"});
  cfg["sets_cache"] = (dir / "cache").string();

  ExperimentConfig a = parse_config(cfg.dump());
  std::string text_a = serialize_config(a);
  ExperimentConfig b = parse_config(text_a);
  std::string text_b = serialize_config(b);
  CHECK(text_a == text_b);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(a.channel.content_hash() == b.channel.content_hash());
  CHECK(b.n == 4);
  CHECK(b.blocks == 2);
  CHECK(b.suites == std::vector<std::string>{"structure", "rates"});
  CHECK(b.construction.method == SetMethod::ExactBec);
}

TEST_CASE("missing config fields are reported as config errors") {
  fs::path dir = fresh_dir("missing_field");
  Json cfg = base_config(dir);
  cfg.erase("seed");
  fs::path cfg_path = write_config(dir, cfg);
  CliResult res = run_cli("construct --config " + cfg_path.string(), dir);
  CHECK(res.exit_code == 2);
  CHECK(contains(res.err, "seed"));

  CliResult garbage = run_cli("construct --config /nonexistent/config.json", dir);
  CHECK(garbage.exit_code != 0);
}

TEST_CASE("degenerate channel ordering is a config error") {
  fs::path dir = fresh_dir("degenerate");
  Json cfg = base_config(dir);
  // Eavesdropper strictly better than both receivers: the scheme's channel
  // assumption cannot hold in either receiver order.
  cfg["channel"]["y1"] = Json{{"type", "bec"}, {"eps", 0.5}};
  cfg["channel"]["y2"] = Json{{"type", "bec"}, {"eps", 0.5}};
  cfg["channel"]["z"] = Json{{"type", "bec"}, {"eps", 0.1}};
  fs::path cfg_path = write_config(dir, cfg);
  CliResult res = run_cli("construct --config " + cfg_path.string(), dir);
  CHECK(res.exit_code == 2);
}
