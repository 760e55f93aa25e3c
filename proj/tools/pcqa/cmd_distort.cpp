#include <memory>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pcqa/distortion.hpp"
#include "pcqa/io.hpp"
#include "report.hpp"

namespace pcqa::cli {

namespace {

struct DistortOptions {
  std::string input;
  std::string output;
  std::string manifest;
  std::string kind;
  std::vector<double> levels;
  std::vector<int> presets;
  std::uint64_t seed = 0;
  std::string format = "binary";
};

io::PlyFormat parse_format(const std::string& name) {
  if (name == "ascii") return io::PlyFormat::Ascii;
  if (name == "binary") return io::PlyFormat::BinaryLittleEndian;
  throw std::invalid_argument("--format must be ascii or binary");
}

int run(const DistortOptions& o) {
  const io::PlyFormat format = parse_format(o.format);
  if (!o.levels.empty() && !o.presets.empty()) throw std::invalid_argument("use either --level or --preset");
  std::vector<distortion::Step> steps = distortion::parse_steps(
      o.kind, o.presets.empty() ? o.levels : std::vector<double>(o.presets.size(), 0.0));
  for (std::size_t i = 0; i < o.presets.size(); ++i) {
    steps[i].level = distortion::preset_level(steps[i].kind, o.presets[i]);
  }

  const auto in = io::load_ply_with_warnings(o.input);
  warn_all(in.warnings);
  const PointCloud out = distortion::apply(in.cloud, distortion::DistortionSpec{steps, o.seed});
  io::save_ply(out, o.output, format);

  Json manifest;
  manifest["command"] = "distort";
  manifest["input"] = o.input;
  manifest["output"] = o.output;
  Json js = Json::array();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Json s;
    s["kind"] = distortion::kind_name(steps[i].kind);
    s["level"] = steps[i].level;
    if (!o.presets.empty()) s["preset"] = o.presets[i];
    if (steps[i].kind == distortion::Kind::Octree) s["note"] = "voxel quantization approximation, not a codec";
    js.push_back(s);
  }
  manifest["steps"] = js;
  manifest["seed"] = o.seed;
  manifest["points_in"] = in.cloud.size();
  manifest["points_out"] = out.size();
  emit(manifest, o.manifest.empty() ? o.output + ".json" : o.manifest);
  return 0;
}

}  // namespace

void register_distort(CLI::App& app, Action& action) {
  auto o = std::make_shared<DistortOptions>();
  CLI::App* sub = app.add_subcommand("distort", "Apply seeded impairments to a cloud");
  sub->add_option("--input", o->input, "Input PLY")->required();
  sub->add_option("--output", o->output, "Output PLY")->required();
  sub->add_option("--kind", o->kind, "cn, ggn, ds, ot, or a '+' chain such as ds+cn")->required();
  sub->add_option("--level", o->levels, "Level per step (repeatable)");
  sub->add_option("--preset", o->presets, "Preset 1..6 per step (repeatable)");
  sub->add_option("--seed", o->seed, "Noise and sampling seed")->capture_default_str();
  sub->add_option("--format", o->format, "ascii or binary")->capture_default_str();
  sub->add_option("--manifest", o->manifest, "Manifest path (default: <output>.json)");
  sub->callback([o, &action] { action = [o] { return run(*o); }; });
}

}  // namespace pcqa::cli
