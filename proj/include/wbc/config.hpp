#pragma once

#include <string>

#include "json.hpp"
#include "wbc/eval.hpp"

namespace wbc {

using Json = nlohmann::json;

struct ConstructionConfig {
  SetMethod method = SetMethod::ExactBec;
  size_t samples = 200000;  // per index, monte_carlo only
};

struct BudgetConfig {
  size_t max_branch_bits = 26;
  double max_table_cells = 5e7;
};

// Everything one experiment needs; parse -> serialize -> parse is identity.
struct ExperimentConfig {
  WiretapSpec channel;
  size_t n = 0;
  size_t blocks = 2;
  double beta = 0.3;
  ConstructionConfig construction;
  size_t trials = 1000;             // reliability suite sessions
  size_t estimator_samples = 200000;
  size_t bootstrap_reps = 200;
  uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<std::string> suites;  // empty means every suite
  std::string out_dir = ".";
  std::string sets_cache;           // empty disables the cache
  BudgetConfig budget;

  void validate() const;  // throws ConfigError
};

const std::vector<std::string>& known_suites();

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig load_config_file(const std::string& path);
uint64_t config_hash(const ExperimentConfig& cfg);

// Output laws accept {"type": bec|bsc|identity|rows, ...} and always
// serialize to the canonical rows form.
OutputLaw law_from_json(const Json& j, const std::string& name);
Json law_to_json(const OutputLaw& law);
WiretapSpec spec_from_json(const Json& j);
Json spec_to_json(const WiretapSpec& spec);

Json sets_to_json(const PolarizedSets& sets);
PolarizedSets sets_from_json(const Json& j);

// Session artifacts produced by the encode command and consumed by decode.
struct SessionArtifact {
  uint64_t cfg_hash = 0;
  uint64_t seed = 0;
  size_t n = 0, blocks = 0;
  std::string case_label;
  SessionInput input;
  SessionKeys keys;
  Session session;
};

void save_session_artifact(const std::string& path, const SessionArtifact& art);
SessionArtifact load_session_artifact(const std::string& path);

struct ObservationBlocks {
  std::vector<Symbols> y1, y2, z;
};

void save_observations(const std::string& path, const ObservationBlocks& obs);
ObservationBlocks load_observations(const std::string& path);

// Report fragments; every emitted report embeds config hash, seed, workers,
// and the library version.
Json report_envelope(const ExperimentConfig& cfg);
Json rate_report_json(const RateReport& r);
Json reliability_json(const ReliabilityPoint& p);
Json constants_json(size_t n, double beta, size_t blocks);
Json layout_summary_json(const SessionLayout& lay);
Json mi_estimate_json(const MiEstimate& est);
Json leakage_json(const LeakageResult& res);
Json tv_json(const TvReport& rep);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace wbc
