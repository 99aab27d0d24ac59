#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace cisim {

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct CommandResult {
  std::vector<Artifact> artifacts;
  Record summary;
  std::vector<std::string> warnings;
};

CommandResult run_command(Subcommand cmd, const RunConfig& cfg);

}  // namespace cisim
