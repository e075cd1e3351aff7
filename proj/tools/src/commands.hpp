#pragma once

#include <functional>
#include <vector>

#include <CLI11.hpp>

namespace netreason::cli {

/// A registered subcommand and the action to run once it has been parsed
/// and its flags validated.
struct Command {
  CLI::App* app = nullptr;
  std::function<void()> run;
};

void add_data_commands(CLI::App& app, std::vector<Command>& out);
void add_train_commands(CLI::App& app, std::vector<Command>& out);
void add_pred_commands(CLI::App& app, std::vector<Command>& out);
void add_eval_commands(CLI::App& app, std::vector<Command>& out);

}  // namespace netreason::cli
