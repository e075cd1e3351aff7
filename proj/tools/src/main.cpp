#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "common.hpp"
#include "netreason/error.hpp"

int main(int argc, char** argv) {
  using namespace netreason;
  CLI::App app{"netreason: netlist reasoning pipelines (corpus, training, annotation, prompting, evaluation)"};
  app.require_subcommand(1);
  app.footer("Exit status: 0 success, 2 invalid flags, 3-9 by failing module "
             "(netlist, encoder, align, pred, eval, nn, util), 1 otherwise.\n"
             "The LLM credential is read from NETREASON_API_KEY only.");
  std::vector<cli::Command> commands;
  cli::add_data_commands(app, commands);
  cli::add_train_commands(app, commands);
  cli::add_pred_commands(app, commands);
  cli::add_eval_commands(app, commands);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) std::cerr << "error [cli.InvalidFlags] ";
    return app.exit(e) == 0 ? 0 : 2;
  }
  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      c.run();
      return 0;
    } catch (const Error& e) {
      std::string message = e.what();
      if (message.starts_with(e.code() + ": ")) message.erase(0, e.code().size() + 2);
      std::cerr << "error [" << e.code() << "] " << message << "\n";
      return cli::exit_code_for(e.code());
    } catch (const std::exception& e) {
      std::cerr << "error [internal] " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
