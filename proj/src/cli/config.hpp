#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ragdepth::cli {

using json = nlohmann::json;

enum class ValueKind { Int, Double, String, DoubleList, StringList };

struct OptionSpec {
  std::string key;
  ValueKind kind;
  // null means "chosen by the command".
  json fallback;
  std::string help;
};

// Keyed by section name: global, simulate, analyze, bounds, toy, harness.
const std::map<std::string, std::vector<OptionSpec>>& schema();
const OptionSpec& option_spec(const std::string& section, const std::string& key);

// Defaults for every section.
json default_config();

// Overlays a config file onto `config`. Unknown sections or keys and values
// of the wrong type raise ConfigError.
void merge_config_file(json& config, const json& file);

// Converts a command-line string to the option's kind.
json parse_flag_value(const OptionSpec& spec, const std::vector<std::string>& raw);

// Typed accessors over one resolved section.
class SectionView {
 public:
  SectionView(std::string name, const json& values) : name_(std::move(name)), values_(values) {}

  bool has(const std::string& key) const;
  long long integer(const std::string& key) const;
  double number(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> texts(const std::string& key) const;
  std::optional<long long> integer_or_null(const std::string& key) const;
  std::optional<double> number_or_null(const std::string& key) const;

 private:
  const json& at(const std::string& key) const;
  std::string name_;
  const json& values_;
};

}  // namespace ragdepth::cli
