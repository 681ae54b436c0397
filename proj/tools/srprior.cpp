#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <exception>
#include <iostream>

#include "srprior/cli/commands.hpp"
#include "srprior/errors.hpp"

namespace {

int fail(std::string_view kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scoring-rule objective priors: solver, samplers and experiment runners", "srprior"};
  app.require_subcommand(1);

  srprior::cli::RunOptions options;
  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  long reps = 0;
  auto* config_opt = app.add_option("--config", config_path, "key = value config file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  auto* reps_opt = app.add_option("--reps", reps, "replication count override");
  app.add_flag("--desk-scale", options.desk_scale, "use the reduced desk-scale presets");
  app.add_option("--threads", options.threads, "worker threads (0 = all cores)");

  for (const auto& name : srprior::cli::command_names()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), 2);
  }

  if (*config_opt) options.config_path = config_path;
  if (*seed_opt) options.seed = seed;
  if (*reps_opt) options.reps = reps;
  options.out_dir = out_dir;
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto files = srprior::cli::run_command(command, options);
    nlohmann::json written = nlohmann::json::array();
    for (const auto& f : files) written.push_back(f.string());
    std::cout << nlohmann::json{{"command", command}, {"files", written}}.dump() << '\n';
  } catch (const srprior::Error& e) {
    return fail(e.kind(), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 1);
  }
  return 0;
}
