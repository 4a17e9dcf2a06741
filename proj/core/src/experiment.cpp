#include "camreloc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "camreloc/parallel.hpp"
#include "camreloc/rng.hpp"

namespace camreloc {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Single: return "single";
    case Scenario::Multi: return "multi";
    case Scenario::Large: return "large";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(const std::string& name) {
  if (name == "single") return Scenario::Single;
  if (name == "multi") return Scenario::Multi;
  if (name == "large") return Scenario::Large;
  return std::nullopt;
}

const char* to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::None: return "none";
    case CorruptionKind::Gamma: return "gamma";
    case CorruptionKind::BrightnessContrast: return "brightness_contrast";
    case CorruptionKind::Noise: return "noise";
    case CorruptionKind::Invert: return "invert";
  }
  return "?";
}

std::optional<CorruptionKind> parse_corruption(const std::string& name) {
  if (name == "none") return CorruptionKind::None;
  if (name == "gamma") return CorruptionKind::Gamma;
  if (name == "brightness_contrast") return CorruptionKind::BrightnessContrast;
  if (name == "noise") return CorruptionKind::Noise;
  if (name == "invert") return CorruptionKind::Invert;
  return std::nullopt;
}

GrayImage apply_corruption(const GrayImage& img, const CorruptionConfig& cfg, int bins,
                           std::uint64_t seed) {
  switch (cfg.kind) {
    case CorruptionKind::None: return img;
    case CorruptionKind::Gamma: return remap_gamma_binwise(img, cfg.gamma, bins);
    case CorruptionKind::BrightnessContrast:
      return remap_brightness_contrast(img, cfg.gain, cfg.bias);
    case CorruptionKind::Noise: return add_noise(img, cfg.noise_stddev, seed);
    case CorruptionKind::Invert: return remap_invert(img);
  }
  return img;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return std::stod(value);
  } catch (...) {
    throw Error(ErrorCode::InvalidArgument, "bad numeric value for " + key);
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    return std::stol(value);
  } catch (...) {
    throw Error(ErrorCode::InvalidArgument, "bad integer value for " + key);
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "expected key = value: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "scenario") {
      const auto s = parse_scenario(value);
      if (!s) throw Error(ErrorCode::InvalidArgument, "unknown scenario: " + value);
      cfg.scenario = *s;
    } else if (key == "methods") {
      cfg.methods.clear();
      std::istringstream ms(value);
      std::string token;
      while (std::getline(ms, token, ',')) {
        const auto m = parse_method(trim(token));
        if (!m) throw Error(ErrorCode::InvalidArgument, "unknown method: " + token);
        cfg.methods.push_back(*m);
      }
      if (cfg.methods.empty()) {
        throw Error(ErrorCode::InvalidArgument, "methods list is empty");
      }
    } else if (key == "radius") {
      cfg.radius_m = to_double(key, value);
    } else if (key == "refs") {
      cfg.reference_count = static_cast<int>(to_long(key, value));
    } else if (key == "fusion") {
      const auto f = parse_fusion(value);
      if (!f) throw Error(ErrorCode::InvalidArgument, "unknown fusion: " + value);
      cfg.fusion = *f;
    } else if (key == "threshold") {
      cfg.failure_threshold_m = to_double(key, value);
    } else if (key == "query_fraction") {
      cfg.query_fraction = to_double(key, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_long(key, value));
    } else if (key == "use_position_prior") {
      cfg.use_position_prior = value == "true" || value == "1";
    } else if (key == "vocabulary_size") {
      cfg.vocabulary_size = static_cast<int>(to_long(key, value));
    } else if (key == "corruption") {
      const auto c = parse_corruption(value);
      if (!c) throw Error(ErrorCode::InvalidArgument, "unknown corruption: " + value);
      cfg.corruption.kind = *c;
    } else if (key == "corruption_fraction") {
      cfg.corruption.fraction = to_double(key, value);
    } else if (key == "corruption_gamma") {
      cfg.corruption.gamma = to_double(key, value);
    } else if (key == "corruption_gain") {
      cfg.corruption.gain = to_double(key, value);
    } else if (key == "corruption_bias") {
      cfg.corruption.bias = to_double(key, value);
    } else if (key == "corruption_noise_stddev") {
      cfg.corruption.noise_stddev = to_double(key, value);
    } else if (key == "detector_max_keypoints") {
      cfg.pipeline.detector.max_keypoints = static_cast<int>(to_long(key, value));
    } else if (key == "detector_threshold") {
      cfg.pipeline.detector.response_threshold = to_double(key, value);
    } else if (key == "match_ratio") {
      cfg.pipeline.match_ratio = to_double(key, value);
    } else if (key == "lift_gate_px") {
      cfg.pipeline.lift_gate_px = to_double(key, value);
    } else if (key == "ransac_iterations") {
      cfg.pipeline.ransac.max_iterations = static_cast<int>(to_long(key, value));
    } else if (key == "ransac_threshold_px") {
      cfg.pipeline.ransac.inlier_threshold_px = to_double(key, value);
    } else if (key == "ransac_confidence") {
      cfg.pipeline.ransac.confidence = to_double(key, value);
    } else if (key == "grid_extent") {
      cfg.pipeline.direct.grid.extent_m = to_double(key, value);
    } else if (key == "grid_step1") {
      cfg.pipeline.direct.grid.step1_m = to_double(key, value);
    } else if (key == "grid_step2") {
      cfg.pipeline.direct.grid.step2_m = to_double(key, value);
    } else if (key == "grid_alpha1") {
      cfg.pipeline.direct.grid.alpha1_deg = to_double(key, value);
    } else if (key == "grid_alpha2") {
      cfg.pipeline.direct.grid.alpha2_deg = to_double(key, value);
    } else if (key == "grid_steps_per_side") {
      cfg.pipeline.direct.grid.steps_per_side = static_cast<int>(to_long(key, value));
    } else if (key == "smoothing_sigma") {
      cfg.pipeline.direct.smoothing_sigma = to_double(key, value);
    } else if (key == "histogram_bins") {
      cfg.pipeline.direct.histogram_bins = static_cast<int>(to_long(key, value));
    } else if (key == "splat_radius") {
      cfg.pipeline.direct.splat_radius_px = to_double(key, value);
    } else if (key == "ceiling_photometric") {
      cfg.pipeline.direct.ceiling_photometric = to_double(key, value);
    } else if (key == "ceiling_mi") {
      cfg.pipeline.direct.ceiling_mi = to_double(key, value);
    } else if (key == "record_timing") {
      cfg.record_timing = value == "true" || value == "1";
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown config key: " + key);
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

void split_queries(std::size_t frame_count, double fraction, std::uint64_t seed,
                   std::vector<int>* query_ids, std::vector<int>* reference_ids) {
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "query fraction must be in (0,1)");
  }
  std::size_t n_queries = static_cast<std::size_t>(std::lround(fraction * frame_count));
  n_queries = std::max<std::size_t>(1, std::min(n_queries, frame_count - 1));
  Rng rng(mix_seed(seed, 0x5EED));
  auto picks = rng.sample_without_replacement(frame_count, n_queries);
  std::sort(picks.begin(), picks.end());
  query_ids->assign(picks.begin(), picks.end());
  reference_ids->clear();
  std::size_t qi = 0;
  for (std::size_t i = 0; i < frame_count; ++i) {
    if (qi < picks.size() && picks[qi] == i) {
      ++qi;
    } else {
      reference_ids->push_back(static_cast<int>(i));
    }
  }
}

ExperimentResult run_experiment(const DatasetIndex& dataset, const ExperimentConfig& cfg) {
  ExperimentResult result;
  split_queries(dataset.size(), cfg.query_fraction, cfg.seed, &result.query_ids,
                &result.reference_ids);

  const PipelineRunner runner(dataset, result.reference_ids, cfg.pipeline);

  // Corrupted queries are picked by seeded coin flips, independent per query.
  std::vector<GrayImage> query_images(result.query_ids.size());
  std::vector<QueryInput> queries(result.query_ids.size());
  for (std::size_t i = 0; i < result.query_ids.size(); ++i) {
    const DatasetFrame& frame = dataset.frames[result.query_ids[i]];
    const std::uint64_t qseed = mix_seed(cfg.seed, 0xC0 + result.query_ids[i]);
    Rng coin(qseed);
    const bool corrupt = cfg.corruption.kind != CorruptionKind::None &&
                         coin.uniform01() < cfg.corruption.fraction;
    query_images[i] = corrupt
                          ? apply_corruption(frame.ref.image, cfg.corruption,
                                             cfg.pipeline.direct.histogram_bins, qseed)
                          : frame.ref.image;
    queries[i].id = frame.ref.id;
    queries[i].image = &query_images[i];
    queries[i].ground_truth = frame.ref.pose;
    queries[i].ground_position = frame.ground_position;
  }

  // Retrieval index only for the large-uncertainty scenario.
  InvertedIndex index;
  if (cfg.scenario == Scenario::Large) {
    std::vector<Descriptor> samples;
    std::vector<std::pair<int, std::vector<Descriptor>>> docs;
    for (const int id : result.reference_ids) {
      const FeatureSet& fs = runner.reference_features(id);
      samples.insert(samples.end(), fs.descriptors.begin(), fs.descriptors.end());
      docs.emplace_back(id, fs.descriptors);
    }
    const int v = std::min<int>(cfg.vocabulary_size, static_cast<int>(samples.size()));
    if (v < 2) {
      throw Error(ErrorCode::TooFewSamples, "not enough descriptors to build a vocabulary");
    }
    const Vocabulary vocab = build_vocabulary(samples, v, mix_seed(cfg.seed, 0xB0B));
    index = index_references(docs, vocab);
  }

  result.records.assign(cfg.methods.size() * queries.size(), ResultRecord{});
  parallel_for(result.records.size(), [&](std::size_t slot) {
    const std::size_t mi = slot / queries.size();
    const std::size_t qi = slot % queries.size();
    const Method method = cfg.methods[mi];
    const QueryInput& q = queries[qi];
    const auto started = std::chrono::steady_clock::now();
    ResultRecord rec;
    switch (cfg.scenario) {
      case Scenario::Single:
        rec = runner.run_single_reference(q, cfg.radius_m, method, cfg.seed);
        break;
      case Scenario::Multi:
        rec = runner.run_multi_reference(q, cfg.radius_m, method, cfg.reference_count,
                                         cfg.fusion, cfg.seed);
        break;
      case Scenario::Large:
        rec = runner.run_large_uncertainty(
            q, index,
            cfg.use_position_prior ? std::optional<double>(cfg.radius_m) : std::nullopt, method,
            cfg.reference_count, cfg.seed);
        break;
    }
    if (cfg.record_timing) {
      const auto elapsed = std::chrono::steady_clock::now() - started;
      rec.time_ms =
          std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count() / 1000.0;
    }
    result.records[slot] = std::move(rec);
  });

  result.summary = summarize(result.records, cfg.failure_threshold_m);
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<ResultRecord>& records, bool with_timing) {
  std::string out =
      "query_id,method,status,reason,translation_error_m,orientation_error_deg,"
      "inlier_count,final_cost,reference_count,reference_ids,time_ms\n";
  for (const auto& r : records) {
    out += std::to_string(r.query_id);
    out += ',';
    out += to_string(r.method);
    out += ',';
    out += r.success ? "success" : "failure";
    out += ',';
    out += to_string(r.reason);
    out += ',';
    out += format_double(r.translation_error_m);
    out += ',';
    out += format_double(r.orientation_error_deg);
    out += ',';
    out += std::to_string(r.inlier_count);
    out += ',';
    out += format_double(r.final_cost);
    out += ',';
    out += std::to_string(r.reference_count);
    out += ',';
    for (std::size_t i = 0; i < r.reference_ids.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(r.reference_ids[i]);
    }
    out += ',';
    out += with_timing ? format_double(r.time_ms) : "0";
    out += '\n';
  }
  return out;
}

std::string summary_to_json(const SummaryReport& summary, const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["scenario"] = to_string(cfg.scenario);
  j["radius_m"] = cfg.radius_m;
  j["reference_count"] = cfg.reference_count;
  j["fusion"] = to_string(cfg.fusion);
  j["failure_threshold_m"] = summary.failure_threshold_m;
  j["seed"] = cfg.seed;
  j["corruption"] = to_string(cfg.corruption.kind);
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (const auto& m : summary.methods) {
    nlohmann::ordered_json jm;
    jm["method"] = to_string(m.method);
    jm["total"] = m.total;
    jm["succeeded"] = m.succeeded;
    jm["success_rate_pct"] = m.success_rate_pct;
    jm["median_translation_error_m"] = m.median_translation_error_m;
    jm["median_orientation_error_deg"] = m.median_orientation_error_deg;
    jm["rmse_translation_error_m"] = m.rmse_translation_error_m;
    jm["rmse_orientation_error_deg"] = m.rmse_orientation_error_deg;
    methods.push_back(jm);
  }
  j["methods"] = methods;
  return j.dump(2) + "\n";
}

void write_reports(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "records.csv", std::ios::binary);
    csv << records_to_csv(result.records, cfg.record_timing);
  }
  {
    std::ofstream json(std::filesystem::path(out_dir) / "summary.json", std::ios::binary);
    json << summary_to_json(result.summary, cfg);
  }
}

}  // namespace camreloc
