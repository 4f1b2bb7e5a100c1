#pragma once

// Command-line front end: `combperc <subcommand> [flags]`.
//
// Exit status: 0 success, 1 violated invariant (or a bound that diverges),
// 2 invalid configuration. Errors are reported as one JSON object on stderr.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace combperc {

struct RunConfig {
  std::string subcommand;
  int d = 2;
  double p = 0.97;
  std::uint64_t seed = 1;
  int width = 50;
  int height = 50;
  int padding = 8;
  int perp_padding = 4;
  int n_lo = 0;
  int n_hi = -1;  // -1: height / 2
  std::size_t trials = 1000;
  std::string out;  // output directory; not serialized
  std::string format;  // empty: the subcommand default
  double q = -1.0;  // -1: 1 - p
  double c = 0.05;
  int max_length = 8;
  int w_max = 60;
  int M = 2;
  int h_max = 12;
  std::string graph;  // fpp-couple graph document; empty: built-in example

  double effective_q() const { return q >= 0.0 ? q : 1.0 - p; }
  int effective_n_hi() const { return n_hi >= 0 ? n_hi : height / 2; }
};

nlohmann::json config_to_json(const RunConfig& config);
// Fields present in `j` override `config`; unknown keys are rejected.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace combperc
