#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "newsfetch/preference.hpp"
#include "newsfetch/trace.hpp"

namespace newsfetch {

struct Candidate {
  ArticleId article_id;
  double score = 0.0;
  std::uint64_t size_bytes = 1;
  Seconds est_fetch_s = 1.0;

  bool operator==(const Candidate&) const = default;
};

// How candidates are ranked. Random is an ablation: a seeded per-article
// priority that ignores the learned preference.
enum class Ranking { Preference, Random };

// Delayed starts each batch as late as the predicted departure allows; Eager
// starts it immediately.
enum class Timing { Delayed, Eager };

struct SchedulerConfig {
  std::uint64_t budget_count = 10;
  std::uint64_t budget_bytes = 0;  // 0 = unlimited
  double alpha = 0.6;
  Seconds safety_margin_s = 30.0;
  double min_score = 0.05;
  // Only articles at most this old are candidates; 0 disables the window.
  Seconds max_article_age_s = 86400.0;
  Ranking ranking = Ranking::Preference;
  Timing timing = Timing::Delayed;
  std::uint64_t ranking_seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct PlannedJob {
  ArticleId article_id;
  Timestamp planned_start = 0.0;
  Seconds est_fetch_s = 0.0;
  double score = 0.0;
};

struct PrefetchPlan {
  std::vector<PlannedJob> jobs;  // back-to-back, descending score
  Timestamp planned_completion = 0.0;

  [[nodiscard]] bool empty() const noexcept { return jobs.empty(); }
};

// Which articles gather_candidates skips (read, cached, or in flight).
using ExcludePredicate = std::function<bool(const ArticleId&)>;

// Published (and inside the age window), not excluded, with a positive
// keyword or path signal, scored, and at least min_score. Under
// Ranking::Random the affinity filter is skipped and scores are the seeded
// priority.
std::vector<Candidate> gather_candidates(const Trace& trace, Timestamp now,
                                         const PreferenceModel& model,
                                         const ExcludePredicate& exclude, Seconds est_fetch_s,
                                         const SchedulerConfig& cfg);

// Deterministic priority in [0,1) for the random-ranking ablation.
double random_priority(const ArticleId& id, std::uint64_t seed);

// Score-descending order, ties to the smaller article id.
void rank(std::vector<Candidate>& candidates);

// Longest prefix of the ranking within budget_count and, when nonzero,
// budget_bytes. No skip-ahead past an item that does not fit.
std::vector<Candidate> select(std::vector<Candidate> candidates, const SchedulerConfig& cfg);

// `selected` must already be in descending score order.
PrefetchPlan plan_delayed(std::span<const Candidate> selected, Timestamp now,
                          Timestamp predicted_departure, const SchedulerConfig& cfg);
PrefetchPlan plan_eager(std::span<const Candidate> selected, Timestamp now,
                        Timestamp predicted_departure, const SchedulerConfig& cfg);

// Score-descending prefix whose cumulative estimated fetch ends by
// min(tail_open_until, predicted_next_request). Empty when the tail is
// already closed.
std::vector<Candidate> piggyback(std::span<const Candidate> pending, Timestamp tail_open_until,
                                 Timestamp now, Timestamp predicted_next_request);

[[nodiscard]] inline bool non_interference(Seconds est, Timestamp now,
                                           Timestamp predicted_next_request) {
  return now + est <= predicted_next_request;
}

// Entry point for the simulation loop: plans only while on WiFi.
PrefetchPlan plan_prefetch(NetKind current, std::span<const Candidate> selected, Timestamp now,
                           Timestamp predicted_departure, const SchedulerConfig& cfg);

}  // namespace newsfetch
