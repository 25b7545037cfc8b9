#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsfetch/config.hpp"
#include "newsfetch/energy.hpp"
#include "newsfetch/netpredict.hpp"
#include "newsfetch/preference.hpp"
#include "newsfetch/trace.hpp"

namespace newsfetch {

struct CacheEntry {
  Timestamp fetched_at = 0.0;
  std::uint64_t size_bytes = 0;
  bool read = false;
};

// Prefetched articles. Unbounded within one run.
using Cache = std::map<ArticleId, CacheEntry>;

struct MetricsReport {
  std::uint64_t reads = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses_wifi = 0;
  std::uint64_t misses_cell = 0;
  std::uint64_t misses_unavailable = 0;
  double hit_ratio = 0.0;
  std::uint64_t cellular_bytes = 0;
  std::uint64_t wifi_demand_bytes = 0;
  std::uint64_t prefetch_bytes = 0;
  std::uint64_t wasted_bytes = 0;
  std::uint64_t prefetch_jobs_completed = 0;
  std::uint64_t prefetch_jobs_aborted = 0;
  double energy_joules = 0.0;
  double baseline_energy_joules = 0.0;
  std::uint64_t baseline_bytes = 0;
  double bandwidth_ratio = 0.0;
  double hb_metric = 0.0;
  double mean_freshness_age_s = 0.0;

  [[nodiscard]] std::uint64_t demand_bytes() const noexcept {
    return cellular_bytes + wifi_demand_bytes;
  }

  bool operator==(const MetricsReport&) const = default;
};

// Flat JSON object with a fixed key order.
nlohmann::ordered_json report_to_json(const MetricsReport& r);
std::string serialize_report(const MetricsReport& r);

// Field-wise b - a over every numeric report field, in report order.
struct ReportDiff {
  std::vector<std::pair<std::string, double>> fields;

  [[nodiscard]] bool all_zero() const;
  [[nodiscard]] double at(std::string_view name) const;  // throws std::out_of_range
};

ReportDiff compare(const MetricsReport& a, const MetricsReport& b);
nlohmann::ordered_json diff_to_json(const ReportDiff& d);

// Test hooks that are not part of the config file.
struct SimOptions {
  // Replace the gap predictor with the true time of the next read.
  bool perfect_next_request = false;
  // Run the budget-0 replay that fills baseline_* and the bandwidth ratio.
  bool compute_baseline = true;
};

struct PlanRecord {
  Timestamp made_at = 0.0;
  Timestamp predicted_departure = 0.0;
  Seconds safety_margin_s = 0.0;
  Timestamp planned_completion = 0.0;
  std::size_t jobs = 0;
};

struct FreshnessSample {
  ArticleId article_id;
  Timestamp fetched_at = 0.0;
  Timestamp read_at = 0.0;

  [[nodiscard]] Seconds age() const noexcept { return read_at - fetched_at; }
};

// Everything a run leaves behind, for reporting and invariant checks.
struct SimOutcome {
  MetricsReport report;
  EnergyLedger ledger{0.0, EnergyParams{}};
  PreferenceModel preference;
  SessionHistory sessions;
  GapHistory gaps;
  FetchTimeEstimator fetch_times;
  Cache cache;
  std::vector<FreshnessSample> freshness;
  std::vector<PlanRecord> plans;
};

SimOutcome simulate(const Trace& trace, const Config& config, const SimOptions& options = {});
MetricsReport run(const Trace& trace, const Config& config);

// Learned state after a run, as one JSON document.
nlohmann::ordered_json state_to_json(const SimOutcome& outcome);

// One report per budget point, in the order given. The budget-0 baseline is
// computed once and shared. Points may run concurrently.
std::vector<MetricsReport> sweep(const Trace& trace, const Config& config,
                                 std::span<const std::uint64_t> budgets);

// Header plus one row per budget point.
std::string sweep_csv(std::span<const std::uint64_t> budgets,
                      std::span<const MetricsReport> reports);

// Shortest text that parses back to the same double.
std::string format_number(double v);

}  // namespace newsfetch
