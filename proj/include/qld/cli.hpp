#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qld/distributions.hpp"

namespace qld::cli {

inline constexpr const char* kFormatVersion = "1";
inline constexpr const char* kSeedEnvVar = "QLD_SEED";
inline constexpr std::uint64_t kDefaultSeed = 20140601;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// lo:hi:steps, inclusive at both ends; steps = 1 means the single point lo.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  static GridSpec parse(std::string_view text);
  std::vector<double> points() const;
  std::string to_string() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct RunConfig {
  std::string command;
  std::string model;
  std::vector<double> q;
  int n = 1;
  std::optional<double> a;
  GridSpec x;
  std::uint64_t samples = 0;
  std::uint64_t seed = kDefaultSeed;
  std::string out;  // empty or "-" for stdout
  unsigned workers = 1;
  bool raw = false;
  bool mc = false;
  std::string kind;    // bound
  std::string regime;  // rate
  std::string format_version = kFormatVersion;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parse arguments (program name excluded). Per-command defaults are applied
// first, then QLD_SEED, then explicit flags; the result is fully validated.
RunConfig parse_args(const std::vector<std::string>& args);

// Argument vector (without program name) that parses back to `cfg`.
std::vector<std::string> serialize(const RunConfig& cfg);

// "uniform[:lo:hi]", "qexp:q[:scale]", "student:nu".
DistributionModel parse_model(std::string_view spec);

// Shortest round-trip decimal form; "inf" for +infinity.
std::string format_double(double v);

std::string cmd_fig1(const RunConfig& cfg);
std::string cmd_fig2(const RunConfig& cfg);
std::string cmd_rate(const RunConfig& cfg);
std::string cmd_bound(const RunConfig& cfg);
std::string cmd_mc(const RunConfig& cfg);
// Report text; `passed` receives the overall verdict.
std::string cmd_selftest(const RunConfig& cfg, bool& passed);

// Full entry point: parse, compute into memory, then write the output in one
// go. Errors produce one "error: kind=<kind> message=<text>" line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qld::cli
