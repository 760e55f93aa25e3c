#include <filesystem>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pcqa/graphsim.hpp"
#include "pcqa/io.hpp"
#include "pcqa/parallel.hpp"
#include "report.hpp"

namespace pcqa::cli {

namespace {

struct ScoreOptions {
  std::string reference;
  std::string distorted;
  std::string color_space = "gcm";
  std::vector<double> channel_weights;
  std::string signal = "color";
  double theta_fraction = 0.1;
  std::size_t matching_k = 50;
  double beta_ratio = 0.001;
  std::size_t filter_length = 4;
  std::size_t knn_k = 10;
  std::string resample = "highpass";
  std::string pooling = "c2";
  std::string tau_scope = "union";
  bool mixed_graph = false;
  std::uint64_t seed = 0;
  std::size_t seed_count = 1;
  std::size_t jobs = default_jobs();
  std::string output;
  std::string content;
  std::string distortion;
};

const char* status_name(graphsim::GraphStatus status) {
  switch (status) {
    case graphsim::GraphStatus::Scored:
      return "scored";
    case graphsim::GraphStatus::Empty:
      return "empty";
    case graphsim::GraphStatus::Skipped:
      return "skipped";
  }
  return "unknown";
}

graphsim::GraphSimConfig build_config(const ScoreOptions& o) {
  graphsim::GraphSimConfig c;
  c.color = color::ColorSpaceConfig::defaults(color::parse_space(o.color_space));
  if (!o.channel_weights.empty()) {
    if (o.channel_weights.size() != 3) throw std::invalid_argument("--channel-weights takes three values");
    for (int i = 0; i < 3; ++i) c.color.weights[i] = o.channel_weights[i];
  }
  c.signals = graphsim::parse_signals(o.signal);
  c.theta_fraction = o.theta_fraction;
  c.matching_k = o.matching_k;
  c.beta_ratio = o.beta_ratio;
  c.resample.filter_length = o.filter_length;
  c.resample.knn_k = o.knn_k;
  if (o.resample == "highpass") {
    c.resample.method = resampling::Method::HighPass;
  } else if (o.resample == "random") {
    c.resample.method = resampling::Method::Random;
  } else {
    throw std::invalid_argument("--resample must be highpass or random");
  }
  const auto preset = graphsim::parse_pooling(o.pooling);
  c.feature_pooling = preset.features;
  c.channel_pooling = preset.channels;
  if (o.tau_scope == "union") {
    c.tau_scope = graphsim::TauScope::Union;
  } else if (o.tau_scope == "per-cluster") {
    c.tau_scope = graphsim::TauScope::PerCluster;
  } else {
    throw std::invalid_argument("--tau-scope must be union or per-cluster");
  }
  c.mixed_graph = o.mixed_graph;
  c.jobs = o.jobs;
  return c;
}

Json config_echo(const graphsim::GraphSimConfig& c, const ScoreOptions& o) {
  Json j;
  j["color_space"] = color::space_name(c.color.space);
  j["channel_weights"] = c.color.weights;
  Json signals = Json::array();
  for (const auto kind : c.signals) signals.push_back(graphsim::signal_name(kind));
  j["signals"] = signals;
  j["theta_fraction"] = c.theta_fraction;
  j["matching_k"] = c.matching_k;
  j["stabilizers"] = {c.t0, c.t1, c.t2};
  j["pooling"] = graphsim::pooling_name(c.feature_pooling, c.channel_pooling);
  j["tau_scope"] = o.tau_scope;
  j["mixed_graph"] = c.mixed_graph;
  j["beta_ratio"] = c.beta_ratio;
  j["resample"] = o.resample;
  j["filter_length"] = c.resample.filter_length;
  j["knn_k"] = c.resample.knn_k;
  j["seed"] = o.seed;
  j["seed_count"] = o.seed_count;
  return j;
}

Json detail(const graphsim::SimilarityScore& s, const graphsim::GraphSimConfig& c) {
  Json j;
  j["quality"] = number(s.quality);
  j["keypoints"] = s.keypoints.indices.size();
  j["scored"] = s.scored;
  j["empty"] = s.empty;
  j["skipped"] = s.skipped;
  Json means;
  for (std::size_t k = 0; k < c.signals.size(); ++k) {
    Json channels = Json::array();
    for (const double m : s.channel_means[k]) channels.push_back(number(m));
    means[std::string(graphsim::signal_name(c.signals[k]))] = channels;
  }
  j["channel_means"] = means;
  Json graphs = Json::array();
  for (const auto& g : s.graphs) {
    Json r;
    r["keypoint"] = g.keypoint;
    r["status"] = status_name(g.status);
    r["score"] = g.status == graphsim::GraphStatus::Skipped ? Json(nullptr) : number(g.score);
    r["ref_neighbors"] = g.ref_neighbors;
    r["dist_neighbors"] = g.dist_neighbors;
    r["tau"] = number(g.tau);
    graphs.push_back(r);
  }
  j["graphs"] = graphs;
  return j;
}

int run(const ScoreOptions& o) {
  graphsim::GraphSimConfig config = build_config(o);
  if (o.seed_count < 1) throw std::invalid_argument("--seed-count must be at least 1");
  const auto ref = io::load_ply_with_warnings(o.reference);
  const auto dist = io::load_ply_with_warnings(o.distorted);
  warn_all(ref.warnings);
  warn_all(dist.warnings);

  Json runs = Json::array();
  std::optional<Json> first;
  double total = 0.0;
  for (std::size_t r = 0; r < o.seed_count; ++r) {
    config.resample.seed = o.seed + r;
    const auto s = graphsim::graphsim(ref.cloud, dist.cloud, config);
    warn_all(s.warnings);
    total += s.quality;
    runs.push_back({{"seed", config.resample.seed}, {"quality", number(s.quality)}});
    if (!first) first = detail(s, config);
  }
  const double mean = total / static_cast<double>(o.seed_count);

  Json doc;
  doc["command"] = "score";
  doc["content"] = o.content.empty() ? std::filesystem::path(o.reference).stem().string() : o.content;
  doc["distortion"] = o.distortion.empty() ? std::filesystem::path(o.distorted).stem().string() : o.distortion;
  doc["inputs"] = {{"reference", o.reference},
                   {"distorted", o.distorted},
                   {"reference_points", ref.cloud.size()},
                   {"distorted_points", dist.cloud.size()}};
  doc["config"] = config_echo(config, o);
  doc["metrics"] = {{"graphsim", number(mean)}};
  doc["runs"] = runs;
  doc["graphsim"] = *first;
  emit(doc, o.output);
  return 0;
}

}  // namespace

void register_score(CLI::App& app, Action& action) {
  auto o = std::make_shared<ScoreOptions>();
  CLI::App* sub = app.add_subcommand("score", "Graph similarity score of a distorted cloud against a reference");
  sub->add_option("reference", o->reference, "Reference PLY")->required();
  sub->add_option("distorted", o->distorted, "Distorted PLY")->required();
  sub->add_option("--color-space", o->color_space, "gcm, yuv or rgb")->capture_default_str();
  sub->add_option("--channel-weights", o->channel_weights, "Three channel weights (default per color space)")
      ->expected(3);
  sub->add_option("--signal", o->signal, "color, coord, normal, mixed, or a comma list")->capture_default_str();
  sub->add_option("--theta-fraction", o->theta_fraction, "Local graph radius as a fraction of the smallest extent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--matching-k", o->matching_k, "Neighbors defining the edge cutoff")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--beta-ratio", o->beta_ratio, "Keypoints as a fraction of the reference size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--filter-length", o->filter_length, "High-pass filter length")->capture_default_str();
  sub->add_option("--knn-k", o->knn_k, "Neighbors of the resampling graph")->capture_default_str();
  sub->add_option("--resample", o->resample, "highpass or random")->capture_default_str();
  sub->add_option("--pooling", o->pooling, "c1, c2, c3 or c4")->capture_default_str();
  sub->add_option("--tau-scope", o->tau_scope, "union or per-cluster")->capture_default_str();
  sub->add_flag("--mixed-graph", o->mixed_graph, "Blend geometry and color distances in edge weights");
  sub->add_option("--seed", o->seed, "Resampling seed")->capture_default_str();
  sub->add_option("--seed-count", o->seed_count, "Average over this many consecutive seeds")->capture_default_str();
  sub->add_option("--jobs", o->jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--output", o->output, "Report path (stdout when omitted)");
  sub->add_option("--content", o->content, "Content label (default: reference file stem)");
  sub->add_option("--distortion", o->distortion, "Distortion label (default: distorted file stem)");
  sub->callback([o, &action] { action = [o] { return run(*o); }; });
}

}  // namespace pcqa::cli
