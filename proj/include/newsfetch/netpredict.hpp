#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsfetch/trace.hpp"

namespace newsfetch {

// The ceil(q*n)-th smallest of n samples (1-based rank, clamped to [1, n]).
// `sorted` must be ascending and non-empty.
double nearest_rank(std::span<const double> sorted, double q);

struct PredictorParams {
  double session_quantile = 0.25;
  double gap_quantile = 0.25;
  Seconds cold_start_session = 600.0;
  Seconds cold_start_gap = 300.0;
  Seconds cold_start_fetch = 2.0;

  void validate() const;  // throws std::invalid_argument
};

// Completed WiFi session durations, per access point and globally.
class SessionHistory {
 public:
  SessionHistory() = default;
  SessionHistory(double quantile, Seconds cold_start);

  // Throws std::invalid_argument when duration <= 0.
  void record_session(const std::string& ap_id, Seconds duration);

  // session_start + nearest-rank quantile of the AP's durations, falling
  // back to the global list, then to the cold-start default.
  [[nodiscard]] Timestamp predict_departure(const std::string& ap_id,
                                            Timestamp session_start) const;

  // Conditional form used while a session is running: only durations longer
  // than the time already spent (now - session_start) are considered. When
  // the session has outlived every recorded duration the cold-start default
  // is added to `now`.
  [[nodiscard]] Timestamp predict_departure(const std::string& ap_id, Timestamp session_start,
                                            Timestamp now) const;

  [[nodiscard]] const std::vector<double>& durations(const std::string& ap_id) const;
  [[nodiscard]] const std::vector<double>& global() const noexcept { return global_; }
  [[nodiscard]] double quantile() const noexcept { return quantile_; }

  friend void to_json(nlohmann::json& j, const SessionHistory& h);

 private:
  double quantile_ = 0.25;
  Seconds cold_start_ = 600.0;
  // Each list is kept sorted ascending.
  std::map<std::string, std::vector<double>> per_ap_;
  std::vector<double> global_;
};

// Inter-request gaps of the user's own browsing.
class GapHistory {
 public:
  GapHistory() = default;
  GapHistory(double quantile, Seconds cold_start);

  // Throws std::invalid_argument when gap <= 0.
  void record_gap(Seconds gap);

  [[nodiscard]] Timestamp predict_next_request(Timestamp last_request) const;

  // Conditional on no request having arrived by `now`: quantile over gaps
  // longer than now - last_request. Returns +inf when the idle stretch is
  // longer than every recorded gap.
  [[nodiscard]] Timestamp predict_next_request(Timestamp last_request, Timestamp now) const;

  [[nodiscard]] const std::vector<double>& gaps() const noexcept { return gaps_; }

  friend void to_json(nlohmann::json& j, const GapHistory& h);

 private:
  double quantile_ = 0.25;
  Seconds cold_start_ = 300.0;
  std::vector<double> gaps_;  // sorted ascending
};

// Running mean of observed fetch durations.
class FetchTimeEstimator {
 public:
  FetchTimeEstimator() = default;
  explicit FetchTimeEstimator(Seconds cold_start);

  // Throws std::invalid_argument when duration <= 0.
  void record_fetch(Seconds duration);
  [[nodiscard]] Seconds estimate_fetch() const noexcept;

  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }

  friend void to_json(nlohmann::json& j, const FetchTimeEstimator& e);

 private:
  Seconds cold_start_ = 2.0;
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
};

}  // namespace newsfetch
