#pragma once

#include <functional>

#include <CLI11.hpp>

namespace pcqa::cli {

/// Each register_* adds a subcommand whose validated options are turned into
/// a runnable action stored in `action` when that subcommand is parsed.
using Action = std::function<int()>;

void register_score(CLI::App& app, Action& action);
void register_baseline(CLI::App& app, Action& action);
void register_distort(CLI::App& app, Action& action);
void register_resample(CLI::App& app, Action& action);
void register_eval(CLI::App& app, Action& action);

}  // namespace pcqa::cli
