#include <exception>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pcqa/error.hpp"
#include "report.hpp"

int main(int argc, char** argv) {
  using namespace pcqa::cli;
  CLI::App app{"Point cloud quality assessment toolkit"};
  app.require_subcommand(1);
  Action action;
  register_score(app, action);
  register_baseline(app, action);
  register_distort(app, action);
  register_resample(app, action);
  register_eval(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnostic("error", "usage", e.what());
    return 2;
  }

  try {
    return action();
  } catch (const pcqa::InputError& e) {
    diagnostic("error", "input", e.what());
    return 2;
  } catch (const pcqa::DomainError& e) {
    diagnostic("error", "domain", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    diagnostic("error", "usage", e.what());
    return 2;
  } catch (const std::exception& e) {
    diagnostic("error", "internal", e.what());
    return 1;
  }
}
