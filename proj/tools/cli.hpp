#ifndef FRACBENCH_CLI_HPP
#define FRACBENCH_CLI_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracfast/experiments.hpp"

namespace fracbench {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Expands `2^-5..2^-9`, `1..4`, `0.1,0.2` and mixes of those joined by commas.
std::vector<double> parse_sweep(const std::string& text);

/// key=value lines; blank lines and `#` comments are skipped.
std::map<std::string, std::string> parse_config_text(const std::string& text);

struct Invocation {
  fracfast::ExperimentConfig config;
  std::string out_dir = "results";
  bool help = false;
  std::string help_text;
};

/// Arguments exclude the program name. Throws UsageError on bad input.
Invocation parse_arguments(const std::vector<std::string>& args);

}  // namespace fracbench

#endif  // FRACBENCH_CLI_HPP
