#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "camreloc/pipelines.hpp"

namespace camreloc {

enum class Scenario { Single, Multi, Large };
const char* to_string(Scenario s);
std::optional<Scenario> parse_scenario(const std::string& name);

enum class CorruptionKind { None, Gamma, BrightnessContrast, Noise, Invert };
const char* to_string(CorruptionKind k);
std::optional<CorruptionKind> parse_corruption(const std::string& name);

struct CorruptionConfig {
  CorruptionKind kind = CorruptionKind::None;
  double fraction = 0.0;   // fraction of queries transformed (seeded pick)
  double gamma = 2.0;      // binwise gamma warp strength
  double gain = 1.2;       // brightness/contrast
  double bias = 0.1;
  double noise_stddev = 0.02;
};

GrayImage apply_corruption(const GrayImage& img, const CorruptionConfig& cfg, int bins,
                           std::uint64_t seed);

struct ExperimentConfig {
  Scenario scenario = Scenario::Single;
  std::vector<Method> methods = {Method::FB, Method::PM, Method::MI, Method::HY};
  double radius_m = 10.0;
  int reference_count = 1;                       // k
  FusionStrategy fusion = FusionStrategy::RWAvg;
  double failure_threshold_m = 10.0;
  double query_fraction = 0.1;
  std::uint64_t seed = 0;
  bool use_position_prior = true;                // large scenario radius filter
  int vocabulary_size = 256;
  CorruptionConfig corruption;
  PipelineConfig pipeline;
  bool record_timing = false;
};

/// key = value lines; '#' starts a comment. Unknown keys are an error.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentResult {
  std::vector<ResultRecord> records;
  SummaryReport summary;
  std::vector<int> query_ids;
  std::vector<int> reference_ids;
};

/// Split queries/references (seeded), corrupt the selected query images,
/// then run every (query, method) pair. Queries execute concurrently; the
/// record order is fixed by (method, query) regardless of scheduling.
ExperimentResult run_experiment(const DatasetIndex& dataset, const ExperimentConfig& cfg);

/// Seeded split: round(fraction * n) distinct query ids; the rest reference.
void split_queries(std::size_t frame_count, double fraction, std::uint64_t seed,
                   std::vector<int>* query_ids, std::vector<int>* reference_ids);

std::string records_to_csv(const std::vector<ResultRecord>& records, bool with_timing);
std::string summary_to_json(const SummaryReport& summary, const ExperimentConfig& cfg);

void write_reports(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::string& out_dir);

}  // namespace camreloc
