#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wkl::cli {

constexpr std::uint64_t kDefaultSeed = 20240601;

struct RunConfig {
  std::string command;     // e.g. "cdf tw2"
  std::string params_path;
  std::map<std::string, std::string> file_keys;  // everything in the params file

  std::optional<double> radius;
  std::optional<int> panels;
  std::optional<int> order;
  std::optional<int> nodes;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<int> sweeps;
  std::optional<double> tail_tol;
  std::optional<double> decay_ratio;

  std::string out;
  std::string json;
  std::string csv;
  std::string svg;
};

// a:b:step, inclusive of b up to rounding.
std::vector<double> parse_grid(const std::string& text);

// Exit codes: 0 success or all checks pass, 1 a check failed, 2 usage or runtime error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace wkl::cli
