#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "wbc/config.hpp"

namespace {

using namespace wbc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSuiteFailure = 3;
constexpr int kExitBudget = 4;

struct CommonFlags {
  std::string config_path;
  std::string out_dir, sets_cache;
  std::vector<std::string> suites;
  uint64_t seed = 0;
  unsigned workers = 0;
  bool seed_set = false, workers_set = false, out_set = false, cache_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config JSON")->required();
  cmd->add_option("--seed", flags.seed, "override the config seed")
      ->each([&](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--workers", flags.workers, "override the worker count")
      ->each([&](const std::string&) { flags.workers_set = true; });
  cmd->add_option("--out", flags.out_dir, "override the output directory")
      ->each([&](const std::string&) { flags.out_set = true; });
  cmd->add_option("--sets-cache", flags.sets_cache, "override the frozen-set cache directory")
      ->each([&](const std::string&) { flags.cache_set = true; });
}

ExperimentConfig prepare(const CommonFlags& flags) {
  ExperimentConfig cfg = load_config_file(flags.config_path);
  if (flags.seed_set) cfg.seed = flags.seed;
  if (flags.workers_set) cfg.workers = flags.workers;
  if (flags.out_set) cfg.out_dir = flags.out_dir;
  if (flags.cache_set) cfg.sets_cache = flags.sets_cache;
  if (!flags.suites.empty()) cfg.suites = flags.suites;
  cfg.validate();
  validate_and_order(cfg.channel);
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

PolarizedSets build_sets(const ExperimentConfig& cfg) {
  SetsCacheKey key;
  key.channel_hash = cfg.channel.content_hash();
  key.n = cfg.n;
  key.beta = cfg.beta;
  key.method = cfg.construction.method;
  // Exact routes ignore samples and seed; normalize so their cache entries hit.
  key.samples = cfg.construction.method == SetMethod::MonteCarlo ? cfg.construction.samples : 0;
  key.seed = cfg.construction.method == SetMethod::MonteCarlo ? cfg.seed : 0;

  if (!cfg.sets_cache.empty())
    if (auto cached = sets_cache_load(cfg.sets_cache, key)) return *cached;

  EntropyProfile profile = compute_entropies(cfg.channel, cfg.n, cfg.construction.method,
                                             key.samples, key.seed, cfg.workers);
  PolarizedSets sets = build_polarized_sets(profile, cfg.beta, key.channel_hash);
  if (!cfg.sets_cache.empty()) sets_cache_store(cfg.sets_cache, key, sets);
  return sets;
}

EnumBudget enum_budget(const ExperimentConfig& cfg) {
  return EnumBudget{cfg.budget.max_branch_bits, cfg.budget.max_table_cells};
}

int cmd_construct(const CommonFlags& flags) {
  ExperimentConfig cfg = prepare(flags);
  PolarizedSets sets = build_sets(cfg);
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);
  RateReport rates = rate_report(lay.plan, sets, cfg.blocks);

  Json out = report_envelope(cfg);
  out["layout"] = layout_summary_json(lay);
  out["rates"] = rate_report_json(rates);
  RateTriple corner = corner_point_rates(cfg.channel);
  out["corner_point"] = Json{{"r_w", corner.r_w}, {"r_s", corner.r_s}, {"r_r", corner.r_r}};
  write_text_file((std::filesystem::path(cfg.out_dir) / "construct.json").string(), out.dump(2));

  const Json& cells = out["layout"]["cells"];
  std::printf("case %s  n=%zu blocks=%zu\n", to_string(lay.plan.label), cfg.n, cfg.blocks);
  std::printf("cells G=%zu C=%zu | G0=%zu G1=%zu G2=%zu G12=%zu | C0=%zu C1=%zu C2=%zu C12=%zu\n",
              cells["G"].get<size_t>(), cells["C"].get<size_t>(), cells["G0"].get<size_t>(),
              cells["G1"].get<size_t>(), cells["G2"].get<size_t>(), cells["G12"].get<size_t>(),
              cells["C0"].get<size_t>(), cells["C1"].get<size_t>(), cells["C2"].get<size_t>(),
              cells["C12"].get<size_t>());
  std::printf("rates r_w=%.6f r_s=%.6f r_r=%.6f key=%.6f extra=%.6f\n", rates.r_w, rates.r_s,
              rates.r_r, rates.key_rate, rates.extra_randomness_rate);
  std::printf("wrote %s\n", (std::filesystem::path(cfg.out_dir) / "construct.json").c_str());
  return kExitOk;
}

int cmd_encode(const CommonFlags& flags, const std::string& session_path,
               const std::string& obs_path) {
  ExperimentConfig cfg = prepare(flags);
  PolarizedSets sets = build_sets(cfg);
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);

  SessionArtifact art;
  art.cfg_hash = config_hash(cfg);
  art.seed = cfg.seed;
  art.n = cfg.n;
  art.blocks = cfg.blocks;
  art.case_label = to_string(lay.plan.label);
  Rng key_rng(derive_seed(cfg.seed, Stream::Keys, {0}));
  art.keys = generate_keys(lay, key_rng);
  Rng msg_rng(derive_seed(cfg.seed, Stream::Messages, {0}));
  art.input = random_session_input(lay, msg_rng);
  Rng fill_rng(derive_seed(cfg.seed, Stream::CarrierFill, {0}));
  art.session = encode_session(lay, art.input, art.keys, fill_rng);

  ObservationBlocks obs;
  for (size_t b = 0; b < cfg.blocks; ++b) {
    Rng ch_rng(derive_seed(cfg.seed, Stream::ChannelNoise, {0, b}));
    BlockObservations one = sample_outputs(cfg.channel, art.session.x_blocks[b], ch_rng);
    obs.y1.push_back(std::move(one.y1));
    obs.y2.push_back(std::move(one.y2));
    obs.z.push_back(std::move(one.z));
  }

  std::string sp = session_path.empty()
                       ? (std::filesystem::path(cfg.out_dir) / "session.json").string()
                       : session_path;
  std::string op = obs_path.empty()
                       ? (std::filesystem::path(cfg.out_dir) / "observations.json").string()
                       : obs_path;
  save_session_artifact(sp, art);
  save_observations(op, obs);

  MessageDims dims = message_dimensions(lay);
  size_t s_total = 0;
  for (size_t b : dims.s_bits) s_total += b;
  std::printf("case %s  n=%zu blocks=%zu  w=%zu bits/block  s=%zu bits total\n",
              art.case_label.c_str(), cfg.n, cfg.blocks, dims.w_bits, s_total);
  std::printf("wrote %s and %s\n", sp.c_str(), op.c_str());
  return kExitOk;
}

int cmd_decode(const CommonFlags& flags, const std::string& session_path,
               const std::string& obs_path) {
  ExperimentConfig cfg = prepare(flags);
  PolarizedSets sets = build_sets(cfg);
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);

  std::string sp = session_path.empty()
                       ? (std::filesystem::path(cfg.out_dir) / "session.json").string()
                       : session_path;
  std::string op = obs_path.empty()
                       ? (std::filesystem::path(cfg.out_dir) / "observations.json").string()
                       : obs_path;
  SessionArtifact art = load_session_artifact(sp);
  ObservationBlocks obs = load_observations(op);
  if (art.n != cfg.n || art.blocks != cfg.blocks)
    throw ConfigError("session artifact was produced for a different (n, blocks)");

  DecodeResult d1 = decode_rx1(lay, art.keys.theta, art.keys.gamma, art.keys.side1, obs.y1,
                               art.session.side_info1);
  DecodeResult d2 = decode_rx2(lay, art.keys.theta, art.keys.gamma, art.keys.side2, obs.y2,
                               art.session.side_info2);

  bool match1 = d1.w == art.input.w && d1.s == art.input.s;
  bool match2 = d2.w == art.input.w && d2.s == art.input.s;

  Json out = report_envelope(cfg);
  out["rx1_match"] = match1;
  out["rx2_match"] = match2;
  std::string rp = (std::filesystem::path(cfg.out_dir) / "decode_report.json").string();
  write_text_file(rp, out.dump(2));
  std::printf("rx1 %s  rx2 %s\n", match1 ? "match" : "MISMATCH", match2 ? "match" : "MISMATCH");
  std::printf("wrote %s\n", rp.c_str());
  return kExitOk;
}

struct SuiteResult {
  Json fragment;
  bool pass = true;
};

SuiteResult suite_structure(const ExperimentConfig& cfg, const PolarizedSets& sets) {
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);
  SuiteResult res;
  res.fragment = layout_summary_json(lay);
  res.fragment["rates"] = rate_report_json(rate_report(lay.plan, sets, cfg.blocks));
  return res;
}

SuiteResult suite_entropy(const ExperimentConfig& cfg, const PolarizedSets& sets) {
  SuiteResult res;
  res.fragment["method"] = to_string(sets.method);
  try {
    EntropyProfile ref = compute_entropies(cfg.channel, cfg.n, SetMethod::Enumeration, 0,
                                           cfg.seed, cfg.workers);
    // MC gets a statistical tolerance against its standard errors; exact routes must agree.
    EntropyProfile got = sets.method == SetMethod::Enumeration
                             ? ref
                             : compute_entropies(cfg.channel, cfg.n, sets.method,
                                                 cfg.construction.samples, cfg.seed, cfg.workers);
    double worst = 0.0;
    bool ok = true;
    for (size_t c = 0; c < kConditionings; ++c)
      for (size_t j = 0; j < cfg.n; ++j) {
        double diff = std::abs(got.h[c][j] - ref.h[c][j]);
        double tol = sets.method == SetMethod::MonteCarlo ? 3.0 * got.se[c][j] + 1e-9 : 1e-9;
        worst = std::max(worst, diff);
        ok = ok && diff <= tol;
      }
    res.fragment["reference"] = "enumeration";
    res.fragment["max_abs_diff"] = worst;
    res.pass = ok;
  } catch (const BudgetExceeded&) {
    res.fragment["reference"] = "skipped (enumeration over budget)";
  }
  return res;
}

SuiteResult suite_roundtrip(const ExperimentConfig& cfg, const PolarizedSets& sets) {
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);
  Rng key_rng(derive_seed(cfg.seed, Stream::Keys, {0}));
  SessionKeys keys = generate_keys(lay, key_rng);
  Rng msg_rng(derive_seed(cfg.seed, Stream::Messages, {0}));
  SessionInput input = random_session_input(lay, msg_rng);
  Rng fill_rng(derive_seed(cfg.seed, Stream::CarrierFill, {0}));
  Session ses = encode_session(lay, input, keys, fill_rng);
  std::vector<Symbols> y1, y2;
  for (size_t b = 0; b < cfg.blocks; ++b) {
    Rng ch_rng(derive_seed(cfg.seed, Stream::ChannelNoise, {0, b}));
    BlockObservations obs = sample_outputs(cfg.channel, ses.x_blocks[b], ch_rng);
    y1.push_back(std::move(obs.y1));
    y2.push_back(std::move(obs.y2));
  }
  DecodeResult d1 = decode_rx1(lay, keys.theta, keys.gamma, keys.side1, y1, ses.side_info1);
  DecodeResult d2 = decode_rx2(lay, keys.theta, keys.gamma, keys.side2, y2, ses.side_info2);
  bool match1 = d1.w == input.w && d1.s == input.s;
  bool match2 = d2.w == input.w && d2.s == input.s;
  bool noiseless = cfg.channel.y1.is_erasure() && cfg.channel.y1.erasure_rate() == 0.0 &&
                   cfg.channel.y2.is_erasure() && cfg.channel.y2.erasure_rate() == 0.0;
  SuiteResult res;
  res.fragment = Json{{"rx1_match", match1}, {"rx2_match", match2}, {"noiseless", noiseless}};
  res.pass = !noiseless || (match1 && match2);
  return res;
}

SuiteResult suite_reliability(const ExperimentConfig& cfg, const PolarizedSets& sets) {
  ReliabilityPoint point =
      run_reliability_trials(cfg.channel, sets, cfg.blocks, cfg.trials, cfg.seed, cfg.workers);
  SuiteResult res;
  res.fragment = reliability_json(point);
  res.fragment["bound"] = reliability_bound(cfg.n, cfg.beta, cfg.blocks);
  return res;
}

SuiteResult suite_secrecy(const ExperimentConfig& cfg, const PolarizedSets& sets) {
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);
  EnumBudget budget = enum_budget(cfg);
  SuiteResult res;
  IndependenceReport ind = chain_mask_independence(lay, budget);
  res.fragment["mask_independence"] =
      Json{{"max_theta_mi", ind.max_theta_mi}, {"max_gamma_mi", ind.max_gamma_mi}};
  res.pass = ind.max_theta_mi <= 1e-10 && ind.max_gamma_mi <= 1e-10;
  LeakageResult leak = exact_leakage(lay, budget);
  res.fragment["exact_leakage"] = leakage_json(leak);
  if (cfg.blocks == 2) {
    double cmi = exact_chain_separation_cmi(lay, budget);
    res.fragment["chain_separation_cmi"] = cmi;
    res.pass = res.pass && std::abs(cmi) <= 1e-10;
  }
  return res;
}

SuiteResult suite_rates(const ExperimentConfig& cfg, const PolarizedSets& sets) {
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);
  SuiteResult res;
  res.fragment = rate_report_json(rate_report(lay.plan, sets, cfg.blocks));
  RateTriple corner = corner_point_rates(cfg.channel);
  res.fragment["corner_point"] =
      Json{{"r_w", corner.r_w}, {"r_s", corner.r_s}, {"r_r", corner.r_r}};
  return res;
}

SuiteResult suite_constants(const ExperimentConfig& cfg, const PolarizedSets&) {
  SuiteResult res;
  res.fragment = constants_json(cfg.n, cfg.beta, cfg.blocks);
  return res;
}

SuiteResult suite_tv(const ExperimentConfig& cfg, const PolarizedSets& sets) {
  SessionLayout lay = make_layout(cfg.channel, sets, cfg.blocks);
  SuiteResult res;
  res.fragment = tv_json(carrier_prefix_tv(lay, enum_budget(cfg)));
  return res;
}

int cmd_run(const CommonFlags& flags) {
  ExperimentConfig cfg = prepare(flags);
  PolarizedSets sets = build_sets(cfg);
  std::vector<std::string> suites = cfg.suites.empty() ? known_suites() : cfg.suites;

  Json report = report_envelope(cfg);
  report["suites"] = Json::object();
  std::vector<std::string> failed;
  for (const std::string& name : suites) {
    SuiteResult res;
    if (name == "structure") res = suite_structure(cfg, sets);
    else if (name == "entropy") res = suite_entropy(cfg, sets);
    else if (name == "roundtrip") res = suite_roundtrip(cfg, sets);
    else if (name == "reliability") res = suite_reliability(cfg, sets);
    else if (name == "secrecy") res = suite_secrecy(cfg, sets);
    else if (name == "rates") res = suite_rates(cfg, sets);
    else if (name == "constants") res = suite_constants(cfg, sets);
    else if (name == "tv") res = suite_tv(cfg, sets);
    else throw ConfigError("unknown suite \"" + name + "\"");
    res.fragment["pass"] = res.pass;
    report["suites"][name] = res.fragment;
    if (!res.pass) failed.push_back(name);
    std::printf("suite %-12s %s\n", name.c_str(), res.pass ? "pass" : "FAIL");
  }

  std::string rp = (std::filesystem::path(cfg.out_dir) / "run_report.json").string();
  write_text_file(rp, report.dump(2));
  std::printf("wrote %s\n", rp.c_str());
  if (!failed.empty()) {
    std::fprintf(stderr, "failed suites:");
    for (const std::string& f : failed) std::fprintf(stderr, " %s", f.c_str());
    std::fprintf(stderr, "\n");
    return kExitSuiteFailure;
  }
  return kExitOk;
}

int cmd_report(const CommonFlags& flags) {
  ExperimentConfig cfg = prepare(flags);
  std::string rp = (std::filesystem::path(cfg.out_dir) / "run_report.json").string();
  Json report = Json::parse(read_text_file(rp));
  std::printf("config %016llx  seed %llu  version %s\n",
              static_cast<unsigned long long>(report.value("config_hash", 0ULL)),
              static_cast<unsigned long long>(report.value("seed", 0ULL)),
              report.value("version", "?").c_str());
  for (const auto& [name, frag] : report["suites"].items())
    std::printf("suite %-12s %s\n", name.c_str(),
                frag.value("pass", false) ? "pass" : "FAIL");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chained polar coding over a wiretap broadcast channel"};
  app.require_subcommand(1);

  CommonFlags construct_flags, encode_flags, decode_flags, run_flags, report_flags;
  std::string enc_session, enc_obs, dec_session, dec_obs;

  CLI::App* construct = app.add_subcommand("construct", "build the polarized sets and the plan");
  add_common(construct, construct_flags);
  CLI::App* encode = app.add_subcommand("encode", "encode one seeded session");
  add_common(encode, encode_flags);
  encode->add_option("--session", enc_session, "session artifact output path");
  encode->add_option("--observations", enc_obs, "observations output path");
  CLI::App* decode = app.add_subcommand("decode", "decode a session artifact");
  add_common(decode, decode_flags);
  decode->add_option("--session", dec_session, "session artifact input path");
  decode->add_option("--observations", dec_obs, "observations input path");
  CLI::App* run = app.add_subcommand("run", "run the configured evaluation suites");
  add_common(run, run_flags);
  run->add_option("--suite", run_flags.suites, "suite to run (repeatable)");
  CLI::App* report = app.add_subcommand("report", "summarize a previous run");
  add_common(report, report_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (construct->parsed()) return cmd_construct(construct_flags);
    if (encode->parsed()) return cmd_encode(encode_flags, enc_session, enc_obs);
    if (decode->parsed()) return cmd_decode(decode_flags, dec_session, dec_obs);
    if (run->parsed()) return cmd_run(run_flags);
    if (report->parsed()) return cmd_report(report_flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DegenerateChannel& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const BudgetExceeded& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    return kExitBudget;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
