#include "ragdepth/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "ragdepth/errors.hpp"
#include "ragdepth/harness/client.hpp"
#include "ragdepth/log.hpp"

namespace ragdepth::cli {

namespace fs = std::filesystem;

namespace {

std::string flag_name(const std::string& key) {
  std::string s = "--" + key;
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

using RawFlags = std::map<std::string, std::vector<std::string>>;

void add_flags(CLI::App& app, const std::string& section, const std::vector<std::string>& keys,
               RawFlags& raw) {
  for (const auto& key : keys) {
    const OptionSpec& spec = option_spec(section, key);
    std::string help = spec.help;
    if (!spec.fallback.is_null()) help += " [" + spec.fallback.dump() + "]";
    auto* opt = app.add_option(flag_name(key), raw[key], help);
    if (spec.kind == ValueKind::DoubleList || spec.kind == ValueKind::StringList) {
      opt->delimiter(',')->expected(1, CLI::detail::expected_max_vector_size);
    } else {
      opt->expected(1);
    }
  }
}

void apply_flags(json& section_values, const std::string& section, const RawFlags& raw) {
  for (const auto& [key, values] : raw) {
    if (values.empty()) continue;
    section_values[key] = parse_flag_value(option_spec(section, key), values);
  }
}

std::string timestamp_dir() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  fs::path base = fs::path("out") / buf;
  fs::path candidate = base;
  for (int k = 1; fs::exists(candidate); ++k) candidate = base.string() + "-" + std::to_string(k);
  return candidate.string();
}

void write_table(std::ostream& os, const Table& table, const std::string& format) {
  if (format == "json") {
    os << table.to_json().dump(2) << '\n';
  } else {
    table.write_csv(os);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Depth and noise experiments for retrieval-augmented reasoning", "ragdepth"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config with per-command sections")
      ->check(CLI::ExistingFile);
  RawFlags global_raw;
  add_flags(app, "global", {"seed", "out", "format", "jobs", "verbosity"}, global_raw);

  std::map<std::string, CLI::App*> groups;
  std::vector<std::pair<const Command*, CLI::App*>> leaves;
  std::vector<RawFlags> leaf_raw(commands().size());
  for (std::size_t i = 0; i < commands().size(); ++i) {
    const Command& cmd = commands()[i];
    CLI::App*& group = groups[cmd.group];
    if (group == nullptr) {
      group = app.add_subcommand(cmd.group, "config section '" + cmd.group + "'");
      group->require_subcommand(1);
      group->fallthrough();
    }
    CLI::App* leaf = group->add_subcommand(cmd.name, cmd.description);
    leaf->fallthrough();
    add_flags(*leaf, cmd.group, cmd.keys, leaf_raw[i]);
    leaves.emplace_back(&cmd, leaf);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, std::cerr);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::size_t active = leaves.size();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i].second->parsed()) active = i;
  }
  const Command& cmd = *leaves.at(active).first;

  json resolved;
  std::string format;
  try {
    json config = default_config();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      json file;
      try {
        file = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config file: ") + e.what());
      }
      merge_config_file(config, file);
    }
    apply_flags(config["global"], "global", global_raw);
    apply_flags(config[cmd.group], cmd.group, leaf_raw[active]);

    json& global = config["global"];
    SectionView g("global", global);
    log::set_level(static_cast<log::Level>(std::clamp<long long>(g.integer("verbosity"), 0, 2)));
    format = g.text("format");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (!g.has("seed")) {
      std::random_device rd;
      global["seed"] = (static_cast<std::uint64_t>(rd()) << 32 | rd()) >> 1;
    }
    if (g.integer("seed") < 0) throw ConfigError("seed must be non-negative");
    if (!g.has("out")) global["out"] = timestamp_dir();
    if (g.integer("jobs") < 0) throw ConfigError("jobs must be non-negative");
    if (g.integer("jobs") == 0) global["jobs"] = std::max(1u, std::thread::hardware_concurrency());

    resolved = {{"command", cmd.group + " " + cmd.name}, {"global", global}, {cmd.group, config[cmd.group]}};
  } catch (const ConfigError& e) {
    log::error("{}", e.what());
    return kExitUsage;
  }

  const SectionView g("global", resolved["global"]);
  const auto seed = static_cast<std::uint64_t>(g.integer("seed"));
  log::note("seed: {}", seed);
  const Context ctx{SectionView(cmd.group, resolved[cmd.group]), seed,
                    static_cast<unsigned>(g.integer("jobs"))};
  try {
    Outcome outcome = cmd.handler(ctx);
    const fs::path dir = g.text("out");
    fs::create_directories(dir);
    write_file(dir / "config.json", resolved.dump(2) + "\n");
    for (const auto& [name, table] : outcome.tables) {
      std::ofstream f(dir / (name + "." + format), std::ios::binary);
      write_table(f, table, format);
    }
    for (const auto& file : outcome.files) write_file(dir / file.name, file.content);
    if (!outcome.tables.empty()) write_table(out, outcome.tables.front().second, format);
    log::info("results written to {}", dir.string());
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    log::error("{}", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    log::error("invalid parameter: {}", e.what());
    return kExitUsage;
  } catch (const harness::EndpointError& e) {
    log::error("endpoint failure: {}", e.what());
    return kExitEndpoint;
  } catch (const std::exception& e) {
    log::error("{}", e.what());
    return kExitRuntime;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out) {
  std::vector<const char*> argv{"ragdepth"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out);
}

}  // namespace ragdepth::cli
