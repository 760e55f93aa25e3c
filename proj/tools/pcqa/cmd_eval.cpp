#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "commands.hpp"
#include "pcqa/error.hpp"
#include "pcqa/eval.hpp"
#include "pcqa/io.hpp"
#include "report.hpp"

namespace pcqa::cli {

namespace {

namespace fs = std::filesystem;

struct EvalOptions {
  std::string scores;
  std::string mos;
  std::string fit_scope = "global";
  bool allow_partial = false;
  std::string output;
};

using Key = std::pair<std::string, std::string>;  // content, distortion

// metric -> (content, distortion) -> value, merged over every report file.
std::map<std::string, std::map<Key, double>> load_scores(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("scores directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, std::map<Key, double>> out;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read '" + file.string() + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw SchemaError(file.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("metrics") || !doc["metrics"].is_object() ||
        !doc.contains("content") || !doc.contains("distortion")) {
      throw SchemaError(file.string() + ": expected content, distortion and a metrics object");
    }
    const Key key{doc["content"].get<std::string>(), doc["distortion"].get<std::string>()};
    for (const auto& [name, value] : doc["metrics"].items()) {
      if (!out[name].emplace(key, read_number(value)).second) {
        throw DuplicateKeyError(file.string() + ": second value of " + name + " for " + key.first + "/" +
                                key.second);
      }
    }
  }
  return out;
}

Json group_json(const eval::GroupReport& g) {
  Json j;
  j["n"] = g.n;
  j["plcc"] = number(g.plcc);
  j["srocc"] = number(g.srocc);
  j["rmse"] = number(g.rmse);
  j["logistic_mapped"] = g.logistic_mapped;
  if (g.logistic_mapped) j["logistic_params"] = g.logistic;
  j["degenerate"] = g.degenerate;
  j["linear_fallback"] = g.linear_fallback;
  return j;
}

std::string cell(const eval::GroupReport* g) {
  char buf[64];
  if (g == nullptr) {
    std::snprintf(buf, sizeof buf, "%-22s", "-");
  } else {
    std::snprintf(buf, sizeof buf, "%6.3f %6.3f %7.3f%s", g->plcc, g->srocc, g->rmse, g->logistic_mapped ? " " : "*");
  }
  return buf;
}

void print_table(std::ostream& os, const std::string& title, const std::vector<std::string>& metrics,
                 const std::map<std::string, eval::EvalReport>& reports, bool by_content) {
  std::set<std::string> groups;
  for (const auto& [_, r] : reports) {
    for (const auto& [g, __] : by_content ? r.by_content : r.by_distortion) groups.insert(g);
  }
  std::size_t width = 8;
  for (const auto& m : metrics) width = std::max(width, m.size());
  os << title << "\n";
  os << std::string(width, ' ');
  char buf[64];
  std::snprintf(buf, sizeof buf, " | %-22s", "ALL");
  os << buf;
  for (const auto& g : groups) {
    std::snprintf(buf, sizeof buf, " | %-22.22s", g.c_str());
    os << buf;
  }
  os << "\n" << std::string(width, ' ');
  for (std::size_t i = 0; i <= groups.size(); ++i) os << " |   PLCC  SROCC    RMSE";
  os << "\n";
  for (const auto& m : metrics) {
    const eval::EvalReport& r = reports.at(m);
    os << m << std::string(width - m.size(), ' ') << " | " << cell(&r.all);
    const auto& part = by_content ? r.by_content : r.by_distortion;
    for (const auto& g : groups) {
      const auto it = part.find(g);
      os << " | " << cell(it == part.end() ? nullptr : &it->second);
    }
    os << "\n";
  }
}

int run(const EvalOptions& o) {
  eval::FitScope scope;
  if (o.fit_scope == "global") {
    scope = eval::FitScope::Global;
  } else if (o.fit_scope == "per-group") {
    scope = eval::FitScope::PerGroup;
  } else {
    throw std::invalid_argument("--fit-scope must be global or per-group");
  }
  const io::MosTable mos = io::load_mos_csv(o.mos);
  const auto scores = load_scores(o.scores);
  if (scores.empty()) throw DomainError("no metric values found under '" + o.scores + "'");

  std::vector<std::string> missing_lines;
  std::map<std::string, eval::EvalReport> reports;
  Json results = Json::object();
  std::vector<std::string> metrics;
  for (const auto& [metric, values] : scores) {
    std::vector<eval::Sample> samples;
    Json missing = Json::array();
    std::size_t dropped = 0;
    for (const auto& row : mos) {
      const auto it = values.find({row.content, row.distortion});
      if (it == values.end()) {
        missing.push_back(row.content + "/" + row.distortion);
        missing_lines.push_back(metric + ": " + row.content + "/" + row.distortion);
        continue;
      }
      if (!std::isfinite(it->second)) {
        ++dropped;
        continue;
      }
      samples.push_back({row.content, row.distortion, it->second, row.mos});
    }
    if (!missing.empty() && !o.allow_partial) continue;
    if (dropped > 0) {
      diagnostic("warning", "warning", metric + ": dropped " + std::to_string(dropped) + " non-finite predictions");
    }
    if (samples.size() < 3) {
      diagnostic("warning", "warning", metric + ": fewer than 3 usable samples, not evaluated");
      continue;
    }
    const eval::EvalReport report = eval::evaluate(samples, scope);
    Json j;
    j["n"] = samples.size();
    j["dropped_nonfinite"] = dropped;
    j["missing"] = missing;
    j["all"] = group_json(report.all);
    Json bc = Json::object();
    for (const auto& [g, r] : report.by_content) bc[g] = group_json(r);
    Json bd = Json::object();
    for (const auto& [g, r] : report.by_distortion) bd[g] = group_json(r);
    j["by_content"] = bc;
    j["by_distortion"] = bd;
    results[metric] = j;
    reports.emplace(metric, report);
    metrics.push_back(metric);
  }
  if (!missing_lines.empty() && !o.allow_partial) {
    std::string list;
    for (std::size_t i = 0; i < missing_lines.size(); ++i) list += (i ? ", " : "") + missing_lines[i];
    throw DomainError("missing scores for MOS rows: " + list);
  }
  if (metrics.empty()) throw DomainError("no metric could be evaluated");

  const char* scope_label = scope == eval::FitScope::Global ? "global" : "per-group";
  std::ostringstream table;
  table << "fit: 5-parameter logistic, " << scope_label << " (* = n < 5, raw correlations)\n\n";
  print_table(table, "by content", metrics, reports, true);
  table << "\n";
  print_table(table, "by distortion", metrics, reports, false);
  std::cout << table.str() << std::flush;

  if (!o.output.empty()) {
    Json doc;
    doc["command"] = "eval";
    doc["mos"] = o.mos;
    doc["scores"] = o.scores;
    doc["fit_scope"] = scope_label;
    doc["logistic"] = "b1*(1/2 - 1/(1+exp(b2*(x-b3)))) + b4*x + b5";
    doc["initialization"] = "linear fit and logistic starts at median, MOS range, both slopes";
    doc["results"] = results;
    emit(doc, o.output);
  }
  return 0;
}

}  // namespace

void register_eval(CLI::App& app, Action& action) {
  auto o = std::make_shared<EvalOptions>();
  CLI::App* sub = app.add_subcommand("eval", "Correlate metric reports with mean opinion scores");
  sub->add_option("--scores", o->scores, "Directory of JSON reports")->required();
  sub->add_option("--mos", o->mos, "CSV with content, distortion and mos columns")->required();
  sub->add_option("--fit-scope", o->fit_scope, "global or per-group")->capture_default_str();
  sub->add_flag("--allow-partial", o->allow_partial, "Evaluate metrics that miss some MOS rows");
  sub->add_option("--output", o->output, "JSON report path");
  sub->callback([o, &action] { action = [o] { return run(*o); }; });
}

}  // namespace pcqa::cli
