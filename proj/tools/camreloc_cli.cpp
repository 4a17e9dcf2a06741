// Command line front end: synthetic dataset generation, retrieval index
// construction, experiment execution and report summarization.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "camreloc/experiment.hpp"
#include "camreloc/rng.hpp"
#include "camreloc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace camreloc;

namespace {

ExperimentConfig make_config(const std::string& config_path, std::uint64_t* seed,
                             std::string* method, double* radius, int* refs,
                             std::string* fusion, double* threshold) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = load_experiment_config(config_path);
  }
  // Command line flags override file values.
  if (seed) cfg.seed = *seed;
  if (method && !method->empty()) {
    const auto m = parse_method(*method);
    if (!m) throw Error(ErrorCode::InvalidArgument, "unknown method: " + *method);
    cfg.methods = {*m};
  }
  if (radius && *radius > 0.0) cfg.radius_m = *radius;
  if (refs && *refs > 0) cfg.reference_count = *refs;
  if (fusion && !fusion->empty()) {
    const auto f = parse_fusion(*fusion);
    if (!f) throw Error(ErrorCode::InvalidArgument, "unknown fusion: " + *fusion);
    cfg.fusion = *f;
  }
  if (threshold && *threshold > 0.0) cfg.failure_threshold_m = *threshold;
  return cfg;
}

int cmd_generate(const std::string& out_dir, std::uint64_t seed, int frames, int width,
                 int height, int stride) {
  SceneSpec spec;
  spec.frame_count = frames;
  spec.image_width = width;
  spec.image_height = height;
  spec.cloud_stride = stride;
  const DatasetIndex dataset = generate_synthetic_dataset(spec, seed);
  write_dataset(out_dir, dataset);
  std::printf("wrote %zu frames to %s\n", dataset.size(), out_dir.c_str());
  return 0;
}

int cmd_index(const std::string& dataset_dir, const std::string& out_path, int vocab_size,
              std::uint64_t seed) {
  const DatasetIndex dataset = load_dataset(dataset_dir);
  DetectorConfig det;
  std::vector<Descriptor> samples;
  std::vector<std::pair<int, std::vector<Descriptor>>> docs;
  for (const auto& frame : dataset.frames) {
    const FeatureSet fs = detect_and_describe(frame.ref.image, det);
    samples.insert(samples.end(), fs.descriptors.begin(), fs.descriptors.end());
    docs.emplace_back(frame.ref.id, fs.descriptors);
  }
  const int v = std::min<int>(vocab_size, static_cast<int>(samples.size()));
  if (v < 2) {
    throw Error(ErrorCode::TooFewSamples, "not enough descriptors for a vocabulary");
  }
  const Vocabulary vocab = build_vocabulary(samples, v, mix_seed(seed, 0xB0B));
  const InvertedIndex index = index_references(docs, vocab);
  save_index(index, out_path);
  std::printf("indexed %zu images into %s (V=%d)\n", index.size(), out_path.c_str(), v);
  return 0;
}

int cmd_run(const std::string& dataset_dir, const ExperimentConfig& cfg,
            const std::string& out_dir) {
  const DatasetIndex dataset = load_dataset(dataset_dir);
  const ExperimentResult result = run_experiment(dataset, cfg);
  write_reports(result, cfg, out_dir);
  std::printf("%zu records -> %s\n", result.records.size(), out_dir.c_str());
  for (const auto& m : result.summary.methods) {
    std::printf("  %s: success %.1f%% (%d/%d) median %.3f m / %.3f deg\n", to_string(m.method),
                m.success_rate_pct, m.succeeded, m.total, m.median_translation_error_m,
                m.median_orientation_error_deg);
  }
  return 0;
}

int cmd_report(const std::string& records_csv, double threshold) {
  std::ifstream in(records_csv);
  if (!in) {
    throw Error(ErrorCode::MissingFile, records_csv);
  }
  std::vector<ResultRecord> records;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    ResultRecord r;
    std::getline(ss, field, ',');
    r.query_id = std::stoi(field);
    std::getline(ss, field, ',');
    const auto m = parse_method(field);
    if (!m) throw Error(ErrorCode::InvalidArgument, "bad method in csv: " + field);
    r.method = *m;
    std::getline(ss, field, ',');
    r.success = field == "success";
    std::getline(ss, field, ',');  // reason, unused here
    std::getline(ss, field, ',');
    r.translation_error_m = std::stod(field);
    std::getline(ss, field, ',');
    r.orientation_error_deg = std::stod(field);
    records.push_back(r);
  }
  const SummaryReport summary = summarize(records, threshold);
  for (const auto& m : summary.methods) {
    std::printf("%s: success %.1f%% (%d/%d) median %.3f m / %.3f deg, rmse %.3f m / %.3f deg\n",
                to_string(m.method), m.success_rate_pct, m.succeeded, m.total,
                m.median_translation_error_m, m.median_orientation_error_deg,
                m.rmse_translation_error_m, m.rmse_orientation_error_deg);
  }
  return 0;
}

int cmd_cost_surface(const std::string& dataset_dir, int query_id, int reference_id,
                     const std::string& method, const std::string& out_csv,
                     const ExperimentConfig& cfg) {
  const DatasetIndex dataset = load_dataset(dataset_dir);
  if (query_id < 0 || static_cast<std::size_t>(query_id) >= dataset.size() || reference_id < 0 ||
      static_cast<std::size_t>(reference_id) >= dataset.size()) {
    throw Error(ErrorCode::InvalidArgument, "frame id out of range");
  }
  const auto m = parse_method(method);
  if (!m || (*m != Method::PM && *m != Method::MI)) {
    throw Error(ErrorCode::InvalidArgument, "cost-surface supports pm or mi");
  }
  const CostKind kind = *m == Method::PM ? CostKind::Photometric : CostKind::MutualInformation;

  EvaluationLog log;
  const PoseEstimate est =
      estimate_direct(kind, dataset.frames[query_id].ref.image, dataset.frames[reference_id].ref,
                      dataset.intrinsics, cfg.pipeline.direct, &log);
  std::ofstream out(out_csv, std::ios::binary);
  out << "pass,offset_a,offset_b,cost\n";
  for (const auto& s : log) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", s.pass, s.offset_a, s.offset_b,
                  s.cost);
    out << buf;
  }
  std::printf("%zu cost samples -> %s (status: %s)\n", log.size(), out_csv.c_str(),
              est.success ? "success" : to_string(est.reason));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-query 6-DoF camera pose estimation toolkit"};
  app.require_subcommand(1);

  std::string dataset_dir;
  std::string out_dir = "out";
  std::string out_path = "index.bin";
  std::string config_path;
  std::string method;
  std::string fusion;
  std::string records_csv;
  std::uint64_t seed = 0;
  double radius = 0.0;
  double threshold = 0.0;
  int refs = 0;
  int frames = 30;
  int width = 320;
  int height = 240;
  int stride = 1;
  int vocab_size = 256;
  int query_id = 0;
  int reference_id = 0;

  auto* generate = app.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("--out", out_dir, "output directory")->required();
  generate->add_option("--seed", seed, "rng seed");
  generate->add_option("--frames", frames, "frame count");
  generate->add_option("--width", width, "image width");
  generate->add_option("--height", height, "image height");
  generate->add_option("--stride", stride, "cloud sampling stride");

  auto* index = app.add_subcommand("index", "build a retrieval index");
  index->add_option("--dataset", dataset_dir, "dataset directory")->required();
  index->add_option("--out", out_path, "index file path");
  index->add_option("--vocab", vocab_size, "vocabulary size");
  index->add_option("--seed", seed, "rng seed");

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--dataset", dataset_dir, "dataset directory")->required();
  run->add_option("--config", config_path, "experiment config file");
  run->add_option("--seed", seed, "rng seed (overrides config)");
  run->add_option("--method", method, "fb|pm|mi|hy (overrides config)");
  run->add_option("--radius", radius, "uncertainty radius meters");
  run->add_option("--refs", refs, "reference count k");
  run->add_option("--fusion", fusion, "maxf|avg|wavg|rwavg");
  run->add_option("--threshold", threshold, "failure threshold meters");
  run->add_option("--out", out_dir, "report output directory");

  auto* report = app.add_subcommand("report", "summarize a records.csv");
  report->add_option("--records", records_csv, "records.csv path")->required();
  report->add_option("--threshold", threshold, "failure threshold meters")->default_val(10.0);

  auto* surface = app.add_subcommand("cost-surface", "dump a grid-search cost surface");
  surface->add_option("--dataset", dataset_dir, "dataset directory")->required();
  surface->add_option("--query", query_id, "query frame id")->required();
  surface->add_option("--reference", reference_id, "reference frame id")->required();
  surface->add_option("--method", method, "pm|mi")->required();
  surface->add_option("--config", config_path, "experiment config file");
  surface->add_option("--out", out_path, "output csv path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return cmd_generate(out_dir, seed, frames, width, height, stride);
    }
    if (index->parsed()) {
      return cmd_index(dataset_dir, out_path, vocab_size, seed);
    }
    if (run->parsed()) {
      const bool seed_given = run->count("--seed") > 0;
      ExperimentConfig cfg =
          make_config(config_path, seed_given ? &seed : nullptr, &method, &radius, &refs,
                      &fusion, &threshold);
      return cmd_run(dataset_dir, cfg, out_dir);
    }
    if (report->parsed()) {
      return cmd_report(records_csv, threshold);
    }
    if (surface->parsed()) {
      ExperimentConfig cfg = make_config(config_path, nullptr, nullptr, nullptr, nullptr,
                                         nullptr, nullptr);
      return cmd_cost_surface(dataset_dir, query_id, reference_id, method, out_path, cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
