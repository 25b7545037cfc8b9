#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace newsfetch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  // parse or config error
inline constexpr int kExitIo = 2;

using std::filesystem::path;

struct SimulateArgs {
  path trace;
  std::optional<path> config;
  path out;
  std::optional<std::uint64_t> seed;
  std::optional<path> state_out;
};

struct GenerateArgs {
  std::optional<path> params;
  path out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> days;
  std::optional<std::uint32_t> articles_per_day;
  std::optional<double> reads_per_day;
};

struct SweepArgs {
  path trace;
  std::optional<path> config;
  std::string budgets;
  path out;
  std::optional<std::uint64_t> seed;
};

// Either summarize an existing state dump (`state`), or run `trace` under
// `config` and write the learned state to `out` (stdout when unset).
struct ReportArgs {
  std::optional<path> state;
  std::optional<path> trace;
  std::optional<path> config;
  std::optional<path> out;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& err);
int cmd_generate(const GenerateArgs& args, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

// "0,5,10" or ranges such as "0..25"; throws std::invalid_argument on an
// empty or malformed list.
std::vector<std::uint64_t> parse_budgets(const std::string& text);

}  // namespace newsfetch::cli
