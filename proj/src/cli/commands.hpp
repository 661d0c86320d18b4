#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "ragdepth/table.hpp"

namespace ragdepth::cli {

struct Context {
  SectionView section;
  std::uint64_t seed;
  unsigned jobs;
};

struct NamedFile {
  std::string name;
  std::string content;
};

struct Outcome {
  // The first table is also written to the data stream.
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<NamedFile> files;
  int exit_code = 0;
};

struct Command {
  std::string group;
  std::string name;
  std::string description;
  std::vector<std::string> keys;
  std::function<Outcome(const Context&)> handler;
};

const std::vector<Command>& commands();

}  // namespace ragdepth::cli
