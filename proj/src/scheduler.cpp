#include "newsfetch/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace newsfetch {

void SchedulerConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  if (!(safety_margin_s >= 0.0) || !std::isfinite(safety_margin_s)) {
    throw std::invalid_argument("safety margin must be non-negative");
  }
  if (!(min_score >= 0.0 && min_score <= 1.0)) {
    throw std::invalid_argument("min_score must lie in [0,1]");
  }
  if (!(max_article_age_s >= 0.0)) throw std::invalid_argument("max article age must be >= 0");
}

double random_priority(const ArticleId& id, std::uint64_t seed) {
  // FNV-1a over the id, then a splitmix64 finalizer.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<Candidate> gather_candidates(const Trace& trace, Timestamp now,
                                         const PreferenceModel& model,
                                         const ExcludePredicate& exclude, Seconds est_fetch_s,
                                         const SchedulerConfig& cfg) {
  std::vector<Candidate> out;
  const Timestamp oldest =
      cfg.max_article_age_s > 0.0 ? now - cfg.max_article_age_s : -std::numeric_limits<double>::infinity();
  // Articles are sorted by publication time.
  auto first = std::lower_bound(trace.articles.begin(), trace.articles.end(), oldest,
                                [](const Article& a, Timestamp t) { return a.published_at < t; });
  for (auto it = first; it != trace.articles.end() && it->published_at <= now; ++it) {
    const Article& a = *it;
    if (exclude && exclude(a.id)) continue;
    double score = 0.0;
    if (cfg.ranking == Ranking::Random) {
      score = random_priority(a.id, cfg.ranking_seed);
    } else {
      PreferenceScore s = score_article(model.keywords, model.sites, a, cfg.alpha);
      if (!(s.kw_component > 0.0 || s.path_component > 0.0)) continue;
      if (s.value < cfg.min_score) continue;
      score = s.value;
    }
    out.push_back({a.id, score, a.size_bytes, est_fetch_s});
  }
  return out;
}

void rank(std::vector<Candidate>& candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.article_id < b.article_id;
  });
}

std::vector<Candidate> select(std::vector<Candidate> candidates, const SchedulerConfig& cfg) {
  rank(candidates);
  std::size_t take = 0;
  std::uint64_t bytes = 0;
  while (take < candidates.size() && take < cfg.budget_count) {
    const std::uint64_t next = bytes + candidates[take].size_bytes;
    if (cfg.budget_bytes != 0 && next > cfg.budget_bytes) break;
    bytes = next;
    ++take;
  }
  candidates.resize(take);
  return candidates;
}

namespace {

// Longest score prefix that still finishes by `deadline` when started at `now`.
std::size_t fitting_prefix(std::span<const Candidate> selected, Timestamp now, Timestamp deadline,
                           Seconds& total) {
  total = 0.0;
  std::size_t n = 0;
  for (const auto& c : selected) {
    if (now + (total + c.est_fetch_s) > deadline) break;
    total += c.est_fetch_s;
    ++n;
  }
  return n;
}

PrefetchPlan forward_plan(std::span<const Candidate> jobs, Timestamp start) {
  PrefetchPlan plan;
  Seconds elapsed = 0.0;
  for (const auto& c : jobs) {
    plan.jobs.push_back({c.article_id, start + elapsed, c.est_fetch_s, c.score});
    elapsed += c.est_fetch_s;
  }
  plan.planned_completion = start + elapsed;
  return plan;
}

}  // namespace

PrefetchPlan plan_delayed(std::span<const Candidate> selected, Timestamp now,
                          Timestamp predicted_departure, const SchedulerConfig& cfg) {
  const Timestamp deadline = predicted_departure - cfg.safety_margin_s;
  Seconds total = 0.0;
  const std::size_t n = fitting_prefix(selected, now, deadline, total);
  if (n == 0) return PrefetchPlan{{}, now};
  auto jobs = selected.first(n);

  // Lay the batch out backwards from the deadline so the last job ends on it.
  std::vector<Timestamp> starts(n);
  Seconds suffix = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix += jobs[i].est_fetch_s;
    starts[i] = deadline - suffix;
  }
  if (starts.front() < now) return forward_plan(jobs, now);

  PrefetchPlan plan;
  for (std::size_t i = 0; i < n; ++i) {
    plan.jobs.push_back({jobs[i].article_id, starts[i], jobs[i].est_fetch_s, jobs[i].score});
  }
  plan.planned_completion = deadline;
  return plan;
}

PrefetchPlan plan_eager(std::span<const Candidate> selected, Timestamp now,
                        Timestamp predicted_departure, const SchedulerConfig& cfg) {
  const Timestamp deadline = predicted_departure - cfg.safety_margin_s;
  Seconds total = 0.0;
  const std::size_t n = fitting_prefix(selected, now, deadline, total);
  if (n == 0) return PrefetchPlan{{}, now};
  return forward_plan(selected.first(n), now);
}

std::vector<Candidate> piggyback(std::span<const Candidate> pending, Timestamp tail_open_until,
                                 Timestamp now, Timestamp predicted_next_request) {
  std::vector<Candidate> out;
  if (!(now < tail_open_until)) return out;
  const Timestamp limit = std::min(tail_open_until, predicted_next_request);
  Seconds total = 0.0;
  for (const auto& c : pending) {
    if (now + (total + c.est_fetch_s) > limit) break;
    total += c.est_fetch_s;
    out.push_back(c);
  }
  return out;
}

PrefetchPlan plan_prefetch(NetKind current, std::span<const Candidate> selected, Timestamp now,
                           Timestamp predicted_departure, const SchedulerConfig& cfg) {
  if (current != NetKind::WiFi) return PrefetchPlan{{}, now};
  return cfg.timing == Timing::Eager ? plan_eager(selected, now, predicted_departure, cfg)
                                     : plan_delayed(selected, now, predicted_departure, cfg);
}

}  // namespace newsfetch
