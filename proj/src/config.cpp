#include "wbc/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wbc {
namespace {

uint64_t fnv1a(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Json bits_to_json(const Bits& b) {
  Json arr = Json::array();
  for (uint8_t bit : b) arr.push_back(static_cast<int>(bit));
  return arr;
}

Bits bits_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of bits");
  Bits out;
  for (const Json& v : j) {
    int bit = v.get<int>();
    if (bit != 0 && bit != 1) throw ConfigError(std::string(what) + " must contain only 0/1");
    out.push_back(static_cast<uint8_t>(bit));
  }
  return out;
}

Json symbols_to_json(const Symbols& s) {
  Json arr = Json::array();
  for (uint8_t sym : s) arr.push_back(static_cast<int>(sym));
  return arr;
}

Symbols symbols_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of symbols");
  Symbols out;
  for (const Json& v : j) out.push_back(static_cast<uint8_t>(v.get<int>()));
  return out;
}

Json bit_blocks_to_json(const std::vector<Bits>& blocks) {
  Json arr = Json::array();
  for (const Bits& b : blocks) arr.push_back(bits_to_json(b));
  return arr;
}

std::vector<Bits> bit_blocks_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of blocks");
  std::vector<Bits> out;
  for (const Json& b : j) out.push_back(bits_from_json(b, what));
  return out;
}

Json index_list_to_json(const IndexList& idx) {
  Json arr = Json::array();
  for (uint32_t j : idx) arr.push_back(j);
  return arr;
}

IndexList index_list_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of indices");
  IndexList out;
  for (const Json& v : j) out.push_back(v.get<uint32_t>());
  return out;
}

const Json& need(const Json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(std::string(where) + ": missing required field \"" + key + "\"");
  return *it;
}

}  // namespace

void ExperimentConfig::validate() const {
  channel.validate();
  if (n < 2 || !is_pow2(n)) throw ConfigError("n must be a power of two, at least 2");
  if (blocks < 2) throw ConfigError("blocks must be at least 2");
  if (!(beta > 0.0 && beta < 0.5)) throw ConfigError("beta must lie in (0, 1/2)");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (construction.method == SetMethod::MonteCarlo && construction.samples == 0)
    throw ConfigError("monte_carlo construction needs a positive sample count");
  for (const std::string& s : suites) {
    const auto& known = known_suites();
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw ConfigError("unknown suite \"" + s + "\"");
  }
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> suites = {
      "structure", "entropy", "roundtrip", "reliability", "secrecy", "rates", "constants", "tv"};
  return suites;
}

OutputLaw law_from_json(const Json& j, const std::string& name) {
  if (!j.is_object()) throw ConfigError("law \"" + name + "\" must be an object");
  std::string type = need(j, "type", name.c_str()).get<std::string>();
  OutputLaw law;
  if (type == "bec") {
    law = OutputLaw::bec(need(j, "eps", name.c_str()).get<double>());
  } else if (type == "bsc") {
    law = OutputLaw::bsc(need(j, "p", name.c_str()).get<double>());
  } else if (type == "identity") {
    law = OutputLaw::identity();
  } else if (type == "rows") {
    law = OutputLaw::from_rows(need(j, "row0", name.c_str()).get<std::vector<double>>(),
                               need(j, "row1", name.c_str()).get<std::vector<double>>());
  } else {
    throw ConfigError("law \"" + name + "\": unknown type \"" + type + "\"");
  }
  law.validate(name);
  return law;
}

Json law_to_json(const OutputLaw& law) {
  return Json{{"type", "rows"}, {"row0", law.row[0]}, {"row1", law.row[1]}};
}

WiretapSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("channel must be an object");
  WiretapSpec spec;
  const Json& src = need(j, "source", "channel");
  if (src.contains("joint_vx")) {
    auto v = src["joint_vx"].get<std::vector<double>>();
    if (v.size() != 4) throw ConfigError("source.joint_vx must have 4 entries (2v + x order)");
    std::copy(v.begin(), v.end(), spec.joint_vx.begin());
  } else {
    double p1 = need(src, "v_one_prob", "source").get<double>();
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("source.v_one_prob must lie in [0, 1]");
    std::array<std::array<double, 2>, 2> px{};  // px[v][x]
    if (!src.contains("prefix") || src["prefix"].get<std::string>() == "copy") {
      px = {{{1.0, 0.0}, {0.0, 1.0}}};
    } else {
      OutputLaw law = law_from_json(src["prefix"], "source.prefix");
      if (law.alphabet != 2) throw ConfigError("source.prefix must be a binary output law");
      px = {{{law.row[0][0], law.row[0][1]}, {law.row[1][0], law.row[1][1]}}};
    }
    for (int v = 0; v < 2; ++v)
      for (int x = 0; x < 2; ++x)
        spec.joint_vx[2 * v + x] = (v ? p1 : 1.0 - p1) * px[v][x];
  }
  spec.y1 = law_from_json(need(j, "y1", "channel"), "y1");
  spec.y2 = law_from_json(need(j, "y2", "channel"), "y2");
  spec.z = law_from_json(need(j, "z", "channel"), "z");
  spec.validate();
  return spec;
}

Json spec_to_json(const WiretapSpec& spec) {
  return Json{{"source", Json{{"joint_vx", std::vector<double>(spec.joint_vx.begin(),
                                                               spec.joint_vx.end())}}},
              {"y1", law_to_json(spec.y1)},
              {"y2", law_to_json(spec.y2)},
              {"z", law_to_json(spec.z)}};
}

ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  cfg.channel = spec_from_json(need(j, "channel", "config"));
  cfg.n = need(j, "n", "config").get<size_t>();
  cfg.seed = need(j, "seed", "config").get<uint64_t>();  // explicit, never wall-clock
  cfg.blocks = j.value("blocks", cfg.blocks);
  cfg.beta = j.value("beta", cfg.beta);
  if (j.contains("construction")) {
    const Json& c = j["construction"];
    cfg.construction.method = set_method_from_string(c.value("method", "exact_bec"));
    cfg.construction.samples = c.value("samples", cfg.construction.samples);
  }
  cfg.trials = j.value("trials", cfg.trials);
  cfg.estimator_samples = j.value("estimator_samples", cfg.estimator_samples);
  cfg.bootstrap_reps = j.value("bootstrap_reps", cfg.bootstrap_reps);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.suites = j.value("suites", cfg.suites);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.sets_cache = j.value("sets_cache", cfg.sets_cache);
  if (j.contains("budget")) {
    const Json& b = j["budget"];
    cfg.budget.max_branch_bits = b.value("max_branch_bits", cfg.budget.max_branch_bits);
    cfg.budget.max_table_cells = b.value("max_table_cells", cfg.budget.max_table_cells);
  }
  cfg.validate();
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  Json j{{"channel", spec_to_json(cfg.channel)},
         {"n", cfg.n},
         {"blocks", cfg.blocks},
         {"beta", cfg.beta},
         {"construction", Json{{"method", to_string(cfg.construction.method)},
                               {"samples", cfg.construction.samples}}},
         {"trials", cfg.trials},
         {"estimator_samples", cfg.estimator_samples},
         {"bootstrap_reps", cfg.bootstrap_reps},
         {"seed", cfg.seed},
         {"workers", cfg.workers},
         {"suites", cfg.suites},
         {"out_dir", cfg.out_dir},
         {"sets_cache", cfg.sets_cache},
         {"budget", Json{{"max_branch_bits", cfg.budget.max_branch_bits},
                         {"max_table_cells", cfg.budget.max_table_cells}}}};
  return j.dump(2);
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a(serialize_config(cfg)); }

Json sets_to_json(const PolarizedSets& sets) {
  Json ent = Json::array(), high = Json::array(), low = Json::array();
  for (size_t c = 0; c < kConditionings; ++c) {
    ent.push_back(sets.entropies[c]);
    high.push_back(index_list_to_json(sets.high[c]));
    low.push_back(index_list_to_json(sets.low[c]));
  }
  return Json{{"n", sets.n},
              {"beta", sets.beta},
              {"delta_n", sets.delta_n},
              {"method", to_string(sets.method)},
              {"samples", sets.samples},
              {"seed", sets.seed},
              {"channel_hash", sets.channel_hash},
              {"entropies", ent},
              {"high", high},
              {"low", low},
              {"version", kLibraryVersion}};
}

PolarizedSets sets_from_json(const Json& j) {
  PolarizedSets sets;
  sets.n = need(j, "n", "sets").get<size_t>();
  sets.beta = need(j, "beta", "sets").get<double>();
  sets.delta_n = need(j, "delta_n", "sets").get<double>();
  sets.method = set_method_from_string(need(j, "method", "sets").get<std::string>());
  sets.samples = need(j, "samples", "sets").get<size_t>();
  sets.seed = need(j, "seed", "sets").get<uint64_t>();
  sets.channel_hash = need(j, "channel_hash", "sets").get<uint64_t>();
  const Json& ent = need(j, "entropies", "sets");
  const Json& high = need(j, "high", "sets");
  const Json& low = need(j, "low", "sets");
  if (ent.size() != kConditionings || high.size() != kConditionings || low.size() != kConditionings)
    throw ConfigError("sets file does not have one entry per conditioning");
  for (size_t c = 0; c < kConditionings; ++c) {
    sets.entropies[c] = ent[c].get<std::vector<double>>();
    sets.high[c] = index_list_from_json(high[c], "sets.high");
    sets.low[c] = index_list_from_json(low[c], "sets.low");
  }
  return sets;
}

std::string SetsCacheKey::filename() const {
  char beta_txt[32];
  std::snprintf(beta_txt, sizeof beta_txt, "%.6g", beta);
  char buf[160];
  std::snprintf(buf, sizeof buf, "sets-%016" PRIx64 "-n%zu-b%s-%s-s%zu-seed%" PRIu64 ".json",
                channel_hash, n, beta_txt, to_string(method), samples, seed);
  return buf;
}

std::optional<PolarizedSets> sets_cache_load(const std::string& dir, const SetsCacheKey& key) {
  std::filesystem::path path = std::filesystem::path(dir) / key.filename();
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  PolarizedSets sets;
  try {
    sets = sets_from_json(Json::parse(read_text_file(path.string())));
  } catch (const std::exception&) {
    return std::nullopt;  // treat unreadable cache entries as misses
  }
  if (sets.n != key.n || sets.beta != key.beta || sets.method != key.method ||
      sets.samples != key.samples || sets.seed != key.seed || sets.channel_hash != key.channel_hash)
    return std::nullopt;
  return sets;
}

void sets_cache_store(const std::string& dir, const SetsCacheKey& key, const PolarizedSets& sets) {
  std::filesystem::create_directories(dir);
  std::filesystem::path path = std::filesystem::path(dir) / key.filename();
  write_text_file(path.string(), sets_to_json(sets).dump(2));
}

void save_session_artifact(const std::string& path, const SessionArtifact& art) {
  Json j{{"config_hash", art.cfg_hash},
         {"seed", art.seed},
         {"n", art.n},
         {"blocks", art.blocks},
         {"case", art.case_label},
         {"messages", Json{{"w", bit_blocks_to_json(art.input.w)},
                           {"s", bit_blocks_to_json(art.input.s)},
                           {"r", bit_blocks_to_json(art.input.r)}}},
         {"keys", Json{{"theta", bits_to_json(art.keys.theta)},
                       {"gamma", bits_to_json(art.keys.gamma)},
                       {"side1", bits_to_json(art.keys.side1)},
                       {"side2", bits_to_json(art.keys.side2)},
                       {"lambda_x", bits_to_json(art.keys.lambda_x)}}},
         {"x_blocks", bit_blocks_to_json(art.session.x_blocks)},
         {"side_info1", bits_to_json(art.session.side_info1)},
         {"side_info2", bits_to_json(art.session.side_info2)},
         {"version", kLibraryVersion}};
  write_text_file(path, j.dump(2));
}

SessionArtifact load_session_artifact(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("session artifact is not valid JSON: ") + e.what());
  }
  SessionArtifact art;
  art.cfg_hash = need(j, "config_hash", "session").get<uint64_t>();
  art.seed = need(j, "seed", "session").get<uint64_t>();
  art.n = need(j, "n", "session").get<size_t>();
  art.blocks = need(j, "blocks", "session").get<size_t>();
  art.case_label = need(j, "case", "session").get<std::string>();
  const Json& msg = need(j, "messages", "session");
  art.input.w = bit_blocks_from_json(need(msg, "w", "messages"), "messages.w");
  art.input.s = bit_blocks_from_json(need(msg, "s", "messages"), "messages.s");
  art.input.r = bit_blocks_from_json(need(msg, "r", "messages"), "messages.r");
  const Json& keys = need(j, "keys", "session");
  art.keys.theta = bits_from_json(need(keys, "theta", "keys"), "keys.theta");
  art.keys.gamma = bits_from_json(need(keys, "gamma", "keys"), "keys.gamma");
  art.keys.side1 = bits_from_json(need(keys, "side1", "keys"), "keys.side1");
  art.keys.side2 = bits_from_json(need(keys, "side2", "keys"), "keys.side2");
  art.keys.lambda_x = bits_from_json(need(keys, "lambda_x", "keys"), "keys.lambda_x");
  art.session.x_blocks = bit_blocks_from_json(need(j, "x_blocks", "session"), "x_blocks");
  art.session.side_info1 = bits_from_json(need(j, "side_info1", "session"), "side_info1");
  art.session.side_info2 = bits_from_json(need(j, "side_info2", "session"), "side_info2");
  return art;
}

void save_observations(const std::string& path, const ObservationBlocks& obs) {
  auto blocks = [](const std::vector<Symbols>& v) {
    Json arr = Json::array();
    for (const Symbols& s : v) arr.push_back(symbols_to_json(s));
    return arr;
  };
  Json j{{"y1", blocks(obs.y1)}, {"y2", blocks(obs.y2)}, {"z", blocks(obs.z)},
         {"version", kLibraryVersion}};
  write_text_file(path, j.dump(2));
}

ObservationBlocks load_observations(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("observations file is not valid JSON: ") + e.what());
  }
  auto blocks = [](const Json& arr, const char* what) {
    if (!arr.is_array()) throw ConfigError(std::string(what) + " must be an array");
    std::vector<Symbols> out;
    for (const Json& s : arr) out.push_back(symbols_from_json(s, what));
    return out;
  };
  ObservationBlocks obs;
  obs.y1 = blocks(need(j, "y1", "observations"), "y1");
  obs.y2 = blocks(need(j, "y2", "observations"), "y2");
  obs.z = blocks(need(j, "z", "observations"), "z");
  return obs;
}

Json report_envelope(const ExperimentConfig& cfg) {
  return Json{{"config_hash", config_hash(cfg)},
              {"seed", cfg.seed},
              {"workers", cfg.workers},
              {"version", kLibraryVersion}};
}

Json rate_report_json(const RateReport& r) {
  return Json{{"n", r.n},
              {"blocks", r.blocks},
              {"r_w", r.r_w},
              {"r_s", r.r_s},
              {"r_r", r.r_r},
              {"key_rate", r.key_rate},
              {"extra_randomness_rate", r.extra_randomness_rate},
              {"w_bits_per_block", r.w_bits_per_block},
              {"s_bits_total", r.s_bits_total},
              {"key_bits_total", r.key_bits_total},
              {"extra_bits_total", r.extra_bits_total}};
}

Json reliability_json(const ReliabilityPoint& p) {
  return Json{{"n", p.n},
              {"blocks", p.blocks},
              {"trials", p.trials},
              {"rx1_block_errors", p.rx1_block_errors},
              {"rx2_block_errors", p.rx2_block_errors},
              {"session_errors", p.session_errors},
              {"session_error_rate", p.session_error_rate},
              {"se", p.se}};
}

Json constants_json(size_t n, double beta, size_t blocks) {
  PolarConstants c = polar_constants(n, beta);
  return Json{{"n", n},
              {"beta", beta},
              {"delta_n", c.delta_n},
              {"delta1", c.delta1},
              {"delta2", c.delta2},
              {"delta_star", c.delta_star},
              {"delta_s", c.delta_s},
              {"reliability_bound", reliability_bound(n, beta, blocks)}};
}

Json layout_summary_json(const SessionLayout& lay) {
  auto sz = [](const IndexList& v) { return v.size(); };
  const Partition& p = lay.part;
  const ChainingPlan& pl = lay.plan;
  return Json{{"n", lay.n},
              {"blocks", lay.blocks},
              {"case", to_string(pl.label)},
              {"cells", Json{{"G", sz(p.G)},   {"C", sz(p.C)},   {"G0", sz(p.G0)},
                             {"G1", sz(p.G1)}, {"G2", sz(p.G2)}, {"G12", sz(p.G12)},
                             {"C0", sz(p.C0)}, {"C1", sz(p.C1)}, {"C2", sz(p.C2)},
                             {"C12", sz(p.C12)}}},
              {"slots", Json{{"R1", sz(pl.R1)},   {"R1p", sz(pl.R1p)},
                             {"R2", sz(pl.R2)},   {"R2p", sz(pl.R2p)},
                             {"R12", sz(pl.R12)}, {"R12p", sz(pl.R12p)},
                             {"I", sz(pl.I)},     {"RS", sz(pl.RS)},
                             {"RLambda", sz(pl.RLambda)}, {"filler", sz(pl.filler)}}},
              {"side_info", Json{{"ups1", sz(lay.ups1)},
                                 {"ups2", sz(lay.ups2)},
                                 {"phi1", sz(lay.phi1)},
                                 {"phi2", sz(lay.phi2)}}},
              {"prefix", Json{{"seed", sz(lay.x_seed)},
                              {"rand", sz(lay.x_rand)},
                              {"mid", sz(lay.x_mid)},
                              {"low", sz(lay.x_low)}}}};
}

Json mi_estimate_json(const MiEstimate& est) {
  return Json{{"samples", est.samples},
              {"mi_plugin", est.mi_plugin},
              {"mi_corrected", est.mi_corrected},
              {"ci_lo", est.ci_lo},
              {"ci_hi", est.ci_hi}};
}

Json leakage_json(const LeakageResult& res) {
  return Json{{"mi_bits", res.mi_bits}, {"s_bits", res.s_bits}, {"z_cells", res.z_cells}};
}

Json tv_json(const TvReport& rep) {
  return Json{{"n", rep.n}, {"tv", rep.tv}, {"tv_per_bit", rep.tv_per_bit}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
  out << text;
  if (!out) throw ConfigError("failed while writing \"" + path + "\"");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open \"" + path + "\" for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace wbc
