#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pcqa/baselines.hpp"
#include "pcqa/error.hpp"
#include "pcqa/io.hpp"
#include "report.hpp"

namespace pcqa::cli {

namespace {

struct BaselineOptions {
  std::string reference;
  std::string distorted;
  std::vector<std::string> metrics;
  std::size_t normal_k = 12;
  std::uint64_t seed = 0;
  std::string output;
  std::string content;
  std::string distortion;
};

int run(const BaselineOptions& o) {
  std::vector<baselines::Metric> selected;
  const bool all = o.metrics.empty() || (o.metrics.size() == 1 && o.metrics[0] == "all");
  if (all) {
    selected.assign(std::begin(baselines::kAllMetrics), std::end(baselines::kAllMetrics));
  } else {
    for (const auto& m : o.metrics) selected.push_back(baselines::parse_metric(m));
  }
  const auto ref = io::load_ply_with_warnings(o.reference);
  const auto dist = io::load_ply_with_warnings(o.distorted);
  warn_all(ref.warnings);
  warn_all(dist.warnings);
  const double p = bounding_box(ref.cloud).max_extent();

  Json metrics = Json::object();
  Json details = Json::array();
  for (const auto m : selected) {
    if (m == baselines::Metric::PsnrYuv && all && (!ref.cloud.has_colors() || !dist.cloud.has_colors())) {
      diagnostic("warning", "warning", "psnr-yuv skipped: a cloud has no colors");
      continue;
    }
    const auto r = baselines::compute(m, ref.cloud, dist.cloud, o.normal_k);
    const std::string name(baselines::metric_name(m));
    metrics[name] = number(r.value);
    Json d;
    d["metric"] = name;
    d["psnr"] = number(r.value);
    d["raw_error"] = number(r.raw_error);
    // Error in units of the reference's largest extent.
    d["normalized_error"] = number(p > 0.0 ? r.raw_error / (p * p) : r.raw_error);
    details.push_back(d);
  }

  Json doc;
  doc["command"] = "baseline";
  doc["content"] = o.content.empty() ? std::filesystem::path(o.reference).stem().string() : o.content;
  doc["distortion"] = o.distortion.empty() ? std::filesystem::path(o.distorted).stem().string() : o.distortion;
  doc["inputs"] = {{"reference", o.reference},
                   {"distorted", o.distorted},
                   {"reference_points", ref.cloud.size()},
                   {"distorted_points", dist.cloud.size()}};
  doc["config"] = {{"normal_k", o.normal_k},
                   {"normals", ref.cloud.has_normals() ? "file" : "pca"},
                   {"geometry_peak", "3*p^2"},
                   {"p", number(p)},
                   {"direction", "worse of both"},
                   {"yuv", "bt709 full range, (6Y+U+V)/8"},
                   {"seed", o.seed}};
  doc["metrics"] = metrics;
  doc["baselines"] = details;
  emit(doc, o.output);
  return 0;
}

}  // namespace

void register_baseline(CLI::App& app, Action& action) {
  auto o = std::make_shared<BaselineOptions>();
  CLI::App* sub = app.add_subcommand("baseline", "Point-to-point, point-to-plane and color PSNR metrics");
  sub->add_option("reference", o->reference, "Reference PLY")->required();
  sub->add_option("distorted", o->distorted, "Distorted PLY")->required();
  sub->add_option("--metric", o->metrics, "m-p2po, m-p2pl, h-p2po, h-p2pl, psnr-yuv or all (repeatable)");
  sub->add_option("--normal-k", o->normal_k, "Neighbors for PCA normals")->capture_default_str();
  sub->add_option("--seed", o->seed, "Echoed in the report; the metrics are not random")->capture_default_str();
  sub->add_option("--output", o->output, "Report path (stdout when omitted)");
  sub->add_option("--content", o->content, "Content label (default: reference file stem)");
  sub->add_option("--distortion", o->distortion, "Distortion label (default: distorted file stem)");
  sub->callback([o, &action] { action = [o] { return run(*o); }; });
}

}  // namespace pcqa::cli
