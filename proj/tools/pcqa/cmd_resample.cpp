#include <memory>
#include <string>

#include "commands.hpp"
#include "pcqa/io.hpp"
#include "pcqa/parallel.hpp"
#include "pcqa/resampling.hpp"
#include "report.hpp"

namespace pcqa::cli {

namespace {

struct ResampleOptions {
  std::string input;
  std::string output;
  std::string manifest;
  double beta_ratio = 0.001;
  std::size_t beta = 0;
  std::size_t filter_length = 4;
  std::size_t knn_k = 10;
  std::string method = "highpass";
  std::uint64_t seed = 0;
  std::size_t jobs = default_jobs();
};

int run(const ResampleOptions& o) {
  resampling::ResampleConfig config;
  if (o.method == "highpass") {
    config.method = resampling::Method::HighPass;
  } else if (o.method == "random") {
    config.method = resampling::Method::Random;
  } else {
    throw std::invalid_argument("--resample must be highpass or random");
  }
  config.filter_length = o.filter_length;
  config.knn_k = o.knn_k;
  config.seed = o.seed;
  config.jobs = o.jobs;

  const auto in = io::load_ply_with_warnings(o.input);
  warn_all(in.warnings);
  config.beta = o.beta > 0 ? o.beta : resampling::beta_from_ratio(in.cloud.size(), o.beta_ratio);
  const spatial::KdTree index(in.cloud);
  const auto keypoints = resampling::resample(in.cloud, index, config);
  warn_all(keypoints.warnings);
  resampling::write_keypoints_csv(in.cloud, keypoints, o.output.empty() ? "/dev/stdout" : o.output);

  Json manifest;
  manifest["command"] = "resample";
  manifest["input"] = o.input;
  manifest["output"] = o.output;
  manifest["points"] = in.cloud.size();
  manifest["beta"] = config.beta;
  manifest["beta_ratio"] = o.beta > 0 ? Json(nullptr) : Json(o.beta_ratio);
  manifest["method"] = o.method;
  manifest["filter_length"] = config.filter_length;
  manifest["knn_k"] = config.knn_k;
  manifest["seed"] = o.seed;
  manifest["keypoints"] = keypoints.indices.size();
  if (!o.manifest.empty()) {
    emit(manifest, o.manifest);
  } else if (!o.output.empty()) {
    emit(manifest, o.output + ".json");
  }
  return 0;
}

}  // namespace

void register_resample(CLI::App& app, Action& action) {
  auto o = std::make_shared<ResampleOptions>();
  CLI::App* sub = app.add_subcommand("resample", "Extract high-frequency keypoints to CSV");
  sub->add_option("--input", o->input, "Input PLY")->required();
  sub->add_option("--output", o->output, "Keypoint CSV (stdout when omitted)");
  sub->add_option("--manifest", o->manifest, "Manifest path (default: <output>.json)");
  auto* ratio = sub->add_option("--beta-ratio", o->beta_ratio, "Keypoints as a fraction of the point count")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  sub->add_option("--beta", o->beta, "Exact keypoint count")->check(CLI::PositiveNumber)->excludes(ratio);
  sub->add_option("--filter-length", o->filter_length, "High-pass filter length")->capture_default_str();
  sub->add_option("--knn-k", o->knn_k, "Neighbors of the resampling graph")->capture_default_str();
  sub->add_option("--resample", o->method, "highpass or random")->capture_default_str();
  sub->add_option("--seed", o->seed, "Sampling seed")->capture_default_str();
  sub->add_option("--jobs", o->jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->callback([o, &action] { action = [o] { return run(*o); }; });
}

}  // namespace pcqa::cli
