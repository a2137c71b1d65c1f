// dirdiff: command-line front end for the experiment runners.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dirdiff/dispatch.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Differentiation along Lipschitz unit vector fields: experiment runner"};
  app.set_version_flag("--version", "1.0.0");
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out, format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  bool print_config = false;

  std::string commands;
  for (const auto& c : dirdiff::known_commands()) commands += (commands.empty() ? "" : ", ") + c;
  app.add_option("command", command, "Runner to execute (" + commands + "); overrides the config key");
  app.add_option("--config", config_path, "Config file of key=value lines")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "Override one key, KEY=VALUE (repeatable)");
  app.add_option("--out", out, "Output path without extension");
  app.add_option("--format", format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
  app.add_option("--seed", seed, "64-bit seed");
  app.add_option("--jobs", jobs, "Worker threads (default: available parallelism)");
  app.add_flag("--print-config", print_config, "Print the resolved config and exit");
  std::string keys = "Config keys (environment override: DIRDIFF_<KEY>, '.' written as '__'):\n";
  for (const auto& k : dirdiff::config_keys()) keys += "  " + k.name + "  " + k.help + "\n";
  app.footer(keys);
  CLI11_PARSE(app, argc, argv);

  dirdiff::RunConfig config;
  try {
    dirdiff::ConfigSources src;
    if (!config_path.empty()) {
      src.file_text = dirdiff::read_file(config_path);
      src.file_name = config_path;
    }
    src.overrides = sets;
    if (!command.empty()) src.overrides.push_back("command=" + command);
    if (!out.empty()) src.overrides.push_back("output.path=" + out);
    if (!format.empty()) src.overrides.push_back("output.format=" + format);
    if (seed) src.overrides.push_back("seed=" + std::to_string(*seed));
    if (jobs) src.overrides.push_back("jobs=" + std::to_string(*jobs));
    config = dirdiff::parse_config(src);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (print_config) {
    std::cout << dirdiff::serialize(config);
    return 0;
  }
  return dirdiff::dispatch(config);
}
