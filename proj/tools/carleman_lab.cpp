#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "carleman/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Carleman estimate laboratory for a two-sided anisotropic interface model"};
  app.require_subcommand(1, 1);

  carleman::RunOptions opt;
  int threads = 0;
  std::uint64_t seed = 0;

  for (const std::string& name : carleman::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: CARLEMAN_LAB_THREADS or 1)");
    sub->add_option("--seed", seed, "random seed overriding the configuration");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : carleman::kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  opt.subcommand = sub->get_name();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--threads")) {
    opt.threads = threads;
  } else if (const char* env = std::getenv("CARLEMAN_LAB_THREADS")) {
    try {
      opt.threads = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: CARLEMAN_LAB_THREADS: expected an integer\n";
      return carleman::kExitValidation;
    }
  }
  return carleman::run(opt, std::cerr);
}
