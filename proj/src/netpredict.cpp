#include "newsfetch/netpredict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace newsfetch {

namespace {

void insert_sorted(std::vector<double>& v, double x) {
  v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}

// Nearest-rank quantile over the suffix of `sorted` strictly above `floor`.
std::optional<double> quantile_above(const std::vector<double>& sorted, double floor, double q) {
  auto first = std::upper_bound(sorted.begin(), sorted.end(), floor);
  if (first == sorted.end()) return std::nullopt;
  return nearest_rank(std::span<const double>(&*first, static_cast<std::size_t>(sorted.end() - first)), q);
}

void check_quantile(double q, const char* what) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in (0,1)");
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

double nearest_rank(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank of an empty sample");
  const auto n = static_cast<double>(sorted.size());
  const double x = q * n;
  // q*n that is integral up to rounding (0.3 * 10) must not be pushed up a rank.
  const double r = std::round(x);
  double rank = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::ceil(x);
  rank = std::clamp(rank, 1.0, n);
  return sorted[static_cast<std::size_t>(rank) - 1];
}

void PredictorParams::validate() const {
  check_quantile(session_quantile, "session quantile");
  check_quantile(gap_quantile, "gap quantile");
  check_positive(cold_start_session, "cold-start session duration");
  check_positive(cold_start_gap, "cold-start gap");
  check_positive(cold_start_fetch, "cold-start fetch time");
}

SessionHistory::SessionHistory(double quantile, Seconds cold_start)
    : quantile_(quantile), cold_start_(cold_start) {
  check_quantile(quantile, "session quantile");
  check_positive(cold_start, "cold-start session duration");
}

void SessionHistory::record_session(const std::string& ap_id, Seconds duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("session duration must be positive");
  insert_sorted(per_ap_[ap_id], duration);
  insert_sorted(global_, duration);
}

const std::vector<double>& SessionHistory::durations(const std::string& ap_id) const {
  static const std::vector<double> kEmpty;
  auto it = per_ap_.find(ap_id);
  return it == per_ap_.end() ? kEmpty : it->second;
}

Timestamp SessionHistory::predict_departure(const std::string& ap_id,
                                            Timestamp session_start) const {
  const auto& own = durations(ap_id);
  if (!own.empty()) return session_start + nearest_rank(own, quantile_);
  if (!global_.empty()) return session_start + nearest_rank(global_, quantile_);
  return session_start + cold_start_;
}

Timestamp SessionHistory::predict_departure(const std::string& ap_id, Timestamp session_start,
                                            Timestamp now) const {
  const double elapsed = std::max(0.0, now - session_start);
  if (elapsed == 0.0) return predict_departure(ap_id, session_start);
  if (auto q = quantile_above(durations(ap_id), elapsed, quantile_)) return session_start + *q;
  if (auto q = quantile_above(global_, elapsed, quantile_)) return session_start + *q;
  if (durations(ap_id).empty() && global_.empty() && elapsed < cold_start_) {
    return session_start + cold_start_;
  }
  return now + cold_start_;
}

GapHistory::GapHistory(double quantile, Seconds cold_start)
    : quantile_(quantile), cold_start_(cold_start) {
  check_quantile(quantile, "gap quantile");
  check_positive(cold_start, "cold-start gap");
}

void GapHistory::record_gap(Seconds gap) {
  if (!(gap > 0.0)) throw std::invalid_argument("request gap must be positive");
  insert_sorted(gaps_, gap);
}

Timestamp GapHistory::predict_next_request(Timestamp last_request) const {
  if (gaps_.empty()) return last_request + cold_start_;
  return last_request + nearest_rank(gaps_, quantile_);
}

Timestamp GapHistory::predict_next_request(Timestamp last_request, Timestamp now) const {
  const double idle = now - last_request;
  if (idle <= 0.0) return predict_next_request(last_request);
  if (gaps_.empty()) {
    return idle < cold_start_ ? last_request + cold_start_
                              : std::numeric_limits<double>::infinity();
  }
  if (auto q = quantile_above(gaps_, idle, quantile_)) return last_request + *q;
  return std::numeric_limits<double>::infinity();
}

FetchTimeEstimator::FetchTimeEstimator(Seconds cold_start) : cold_start_(cold_start) {
  check_positive(cold_start, "cold-start fetch time");
}

void FetchTimeEstimator::record_fetch(Seconds duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("fetch duration must be positive");
  ++count_;
  sum_ += duration;
}

Seconds FetchTimeEstimator::estimate_fetch() const noexcept {
  return count_ == 0 ? cold_start_ : sum_ / static_cast<double>(count_);
}

void to_json(nlohmann::json& j, const SessionHistory& h) {
  j = nlohmann::json{{"quantile", h.quantile_},
                     {"cold_start_s", h.cold_start_},
                     {"per_ap", h.per_ap_},
                     {"global", h.global_}};
}

void to_json(nlohmann::json& j, const GapHistory& h) {
  j = nlohmann::json{{"quantile", h.quantile_}, {"cold_start_s", h.cold_start_}, {"gaps", h.gaps_}};
}

void to_json(nlohmann::json& j, const FetchTimeEstimator& e) {
  j = nlohmann::json{{"count", e.count_},
                     {"mean_seconds", e.count_ == 0 ? 0.0 : e.estimate_fetch()},
                     {"cold_start_s", e.cold_start_}};
}

}  // namespace newsfetch
