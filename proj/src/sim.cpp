#include "newsfetch/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "newsfetch/scheduler.hpp"

namespace newsfetch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ties at one timestamp resolve in this order.
enum class EventKind : int {
  NetBoundary = 0,
  UserRead = 1,
  DemandComplete = 2,
  PrefetchComplete = 3,
  PrefetchStart = 4,
  RefreshTick = 5,
};

struct Event {
  Timestamp at;
  EventKind kind;
  std::uint64_t seq;
  std::size_t index;
  std::uint64_t token;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.at != b.at) return a.at > b.at;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

struct RunningJob {
  ArticleId id;
  Timestamp start;
  Timestamp end;
  std::uint64_t size;
  double bandwidth;
  std::uint64_t token;
};

enum class StartResult { Started, Skipped, Deferred };

class Simulation {
 public:
  Simulation(const Trace& trace, const Config& config, const SimOptions& options)
      : trace_(trace),
        cfg_(config),
        opts_(options),
        ledger_(trace.horizon, config.energy),
        sessions_(config.predictor.session_quantile, config.predictor.cold_start_session),
        gaps_(config.predictor.gap_quantile, config.predictor.cold_start_gap),
        fetch_times_(config.predictor.cold_start_fetch) {
    preference_.keywords = KeywordStore(config.preference, 0.0);
  }

  SimOutcome run() {
    for (std::size_t i = 0; i < trace_.network.size(); ++i) {
      push(trace_.network[i].start, EventKind::NetBoundary, i);
    }
    for (std::size_t i = 0; i < trace_.reads.size(); ++i) {
      push(trace_.reads[i].at, EventKind::UserRead, i);
    }
    const Seconds period = cfg_.preference.refresh_period;
    for (std::uint64_t k = 1; static_cast<double>(k) * period <= trace_.horizon; ++k) {
      push(static_cast<double>(k) * period, EventKind::RefreshTick);
    }

    while (!queue_.empty() && queue_.top().at <= trace_.horizon) {
      Event e = queue_.top();
      queue_.pop();
      switch (e.kind) {
        case EventKind::NetBoundary:
          on_net_boundary(e);
          break;
        case EventKind::UserRead:
          on_read(e);
          break;
        case EventKind::DemandComplete:
          on_demand_complete(e);
          break;
        case EventKind::PrefetchComplete:
          on_prefetch_complete(e);
          break;
        case EventKind::PrefetchStart:
          on_prefetch_start(e);
          break;
        case EventKind::RefreshTick:
          on_refresh(e);
          break;
      }
    }
    if (running_) abort_running(trace_.horizon);
    return finish();
  }

 private:
  void push(Timestamp at, EventKind kind, std::size_t index = 0, std::uint64_t token = 0) {
    queue_.push(Event{at, kind, seq_++, index, token});
  }

  const NetInterval& current() const { return trace_.network[net_idx_]; }

  Timestamp next_request_after(Timestamp t) const {
    if (opts_.perfect_next_request) {
      return next_read_ < trace_.reads.size() ? trace_.reads[next_read_].at : kInf;
    }
    if (!last_request_) return gaps_.predict_next_request(t);
    return gaps_.predict_next_request(*last_request_, t);
  }

  void on_net_boundary(const Event& e) {
    const Timestamp t = e.at;
    if (e.index > 0) {
      const NetInterval& prev = trace_.network[e.index - 1];
      if (prev.kind == NetKind::WiFi) {
        if (running_) abort_running(t);
        sessions_.record_session(*prev.ap_id, prev.end - session_start_);
      }
    }
    net_idx_ = e.index;
    ++generation_;
    piggyback_.clear();
    if (current().kind == NetKind::WiFi) {
      session_start_ = t;
      replan(t, std::nullopt);
    }
  }

  void on_read(const Event& e) {
    const Timestamp t = e.at;
    const ReadEvent& r = trace_.reads[e.index];
    const Article& a = trace_.article(r.article_id);
    next_read_ = e.index + 1;
    if (last_request_ && t > *last_request_) gaps_.record_gap(t - *last_request_);
    last_request_ = t;
    ++report_.reads;

    if (auto it = cache_.find(a.id); it != cache_.end()) {
      ++report_.hits;
      it->second.read = true;
      freshness_.push_back({a.id, it->second.fetched_at, t});
    } else if (current().kind == NetKind::None) {
      ++report_.misses_unavailable;
    } else {
      if (running_) abort_running(t);
      const NetInterval& net = current();
      const Timestamp start = std::max(t, busy_until_);
      const Seconds duration = static_cast<double>(a.size_bytes) / *net.bandwidth_bytes_per_s;
      const bool wifi = net.kind == NetKind::WiFi;
      ledger_.account_transfer(wifi ? RadioKind::WiFi : RadioKind::Cellular, start, duration,
                               a.size_bytes, TransferPurpose::Demand);
      busy_until_ = start + duration;
      if (wifi) {
        ++report_.misses_wifi;
        report_.wifi_demand_bytes += a.size_bytes;
      } else {
        ++report_.misses_cell;
        report_.cellular_bytes += a.size_bytes;
      }
      push(busy_until_, EventKind::DemandComplete, 0, wifi ? 1 : 0);
    }
    read_.insert(a.id);
    preference_.observe(a);
  }

  void on_demand_complete(const Event& e) {
    const Timestamp t = e.at;
    if (t < busy_until_) return;  // another demand fetch is queued behind this one
    const bool wifi_tail = e.token == 1 && current().kind == NetKind::WiFi;
    replan(t, wifi_tail ? std::optional<Timestamp>(t + cfg_.energy.t_tail_wifi) : std::nullopt);
  }

  void on_prefetch_complete(const Event& e) {
    if (!running_ || running_->token != e.token) return;
    const Timestamp t = e.at;
    RunningJob job = std::move(*running_);
    running_.reset();
    ledger_.account_transfer(RadioKind::WiFi, job.start, t - job.start, job.size,
                             TransferPurpose::Prefetch);
    report_.prefetch_bytes += job.size;
    ++report_.prefetch_jobs_completed;
    fetch_times_.record_fetch(t - job.start);
    cache_[job.id] = CacheEntry{t, job.size, false};
    if (!piggyback_.empty()) {
      continue_piggyback(t);
    } else {
      replan(t, std::nullopt);
    }
  }

  void on_prefetch_start(const Event& e) {
    if (e.token != generation_) return;
    replan(e.at, std::nullopt);
  }

  void on_refresh(const Event& e) {
    preference_.keywords.refresh(e.at);
    if (piggyback_.empty()) replan(e.at, std::nullopt);
  }

  void abort_running(Timestamp t) {
    RunningJob job = std::move(*running_);
    running_.reset();
    piggyback_.clear();
    const Seconds elapsed = t - job.start;
    if (elapsed > 0.0) {
      const auto moved = static_cast<std::uint64_t>(std::floor(elapsed * job.bandwidth));
      const std::uint64_t bytes = std::min(job.size, moved);
      ledger_.account_transfer(RadioKind::WiFi, job.start, elapsed, bytes,
                               TransferPurpose::Prefetch);
      report_.prefetch_bytes += bytes;
      report_.wasted_bytes += bytes;
    }
    ++report_.prefetch_jobs_aborted;
  }

  StartResult try_start(Timestamp t, const ArticleId& id, Seconds est) {
    if (running_ || t < busy_until_ || current().kind != NetKind::WiFi) return StartResult::Skipped;
    if (cache_.contains(id) || read_.contains(id)) return StartResult::Skipped;
    const Timestamp next = next_request_after(t);
    if (!non_interference(est, t, next)) {
      const Timestamp retry = next > t ? next : t + est;
      if (retry <= trace_.horizon) push(retry, EventKind::PrefetchStart, 0, generation_);
      return StartResult::Deferred;
    }
    const Article& a = trace_.article(id);
    const double bw = *current().bandwidth_bytes_per_s;
    const Seconds duration = static_cast<double>(a.size_bytes) / bw;
    running_ = RunningJob{id, t, t + duration, a.size_bytes, bw, ++job_token_};
    push(t + duration, EventKind::PrefetchComplete, 0, job_token_);
    return StartResult::Started;
  }

  void continue_piggyback(Timestamp t) {
    const Seconds est = fetch_times_.estimate_fetch();
    while (!piggyback_.empty()) {
      ArticleId id = std::move(piggyback_.front());
      piggyback_.pop_front();
      switch (try_start(t, id, est)) {
        case StartResult::Started:
          return;
        case StartResult::Deferred:
          piggyback_.clear();
          return;
        case StartResult::Skipped:
          break;
      }
    }
    replan(t, std::nullopt);
  }

  void replan(Timestamp t, std::optional<Timestamp> tail_open_until) {
    ++generation_;
    piggyback_.clear();
    if (current().kind != NetKind::WiFi || t < busy_until_) return;

    const Seconds est = fetch_times_.estimate_fetch();
    auto candidates = gather_candidates(
        trace_, t, preference_, [this](const ArticleId& id) { return read_.contains(id); }, est,
        cfg_.scheduler);
    // The budget covers what the device should hold; fetch what is missing.
    std::vector<Candidate> jobs;
    for (auto& c : select(std::move(candidates), cfg_.scheduler)) {
      if (cache_.contains(c.article_id)) continue;
      if (running_ && running_->id == c.article_id) continue;
      jobs.push_back(std::move(c));
    }
    if (jobs.empty()) return;

    const Timestamp departure = sessions_.predict_departure(*current().ap_id, session_start_, t);
    if (running_) {
      record(t, departure, plan_prefetch(NetKind::WiFi, jobs, std::max(t, running_->end),
                                         departure, cfg_.scheduler));
      return;  // completion of the running job replans
    }

    std::size_t early = 0;
    Timestamp plan_from = t;
    if (tail_open_until) {
      early = piggyback(jobs, *tail_open_until, t, next_request_after(t)).size();
      for (std::size_t i = 0; i < early; ++i) plan_from += jobs[i].est_fetch_s;
    }
    const PrefetchPlan plan = plan_prefetch(NetKind::WiFi, std::span(jobs).subspan(early),
                                            plan_from, departure, cfg_.scheduler);
    record(t, departure, plan);

    if (early > 0) {
      for (std::size_t i = 0; i < early; ++i) piggyback_.push_back(jobs[i].article_id);
      continue_piggyback(t);
      return;
    }
    if (plan.empty()) return;
    const PlannedJob& first = plan.jobs.front();
    if (first.planned_start <= t) {
      try_start(t, first.article_id, first.est_fetch_s);
    } else {
      push(first.planned_start, EventKind::PrefetchStart, 0, generation_);
    }
  }

  void record(Timestamp t, Timestamp departure, const PrefetchPlan& plan) {
    if (plan.empty()) return;
    plans_.push_back({t, departure, cfg_.scheduler.safety_margin_s, plan.planned_completion,
                      plan.jobs.size()});
  }

  SimOutcome finish() {
    for (const auto& [_, entry] : cache_) {
      if (!entry.read) report_.wasted_bytes += entry.size_bytes;
    }
    report_.hit_ratio =
        report_.reads == 0 ? 0.0
                           : static_cast<double>(report_.hits) / static_cast<double>(report_.reads);
    if (!freshness_.empty()) {
      double sum = 0.0;
      for (const auto& s : freshness_) sum += s.age();
      report_.mean_freshness_age_s = sum / static_cast<double>(freshness_.size());
    }
    report_.energy_joules = ledger_.total_energy();

    SimOutcome out;
    out.report = report_;
    out.ledger = std::move(ledger_);
    out.preference = std::move(preference_);
    out.sessions = std::move(sessions_);
    out.gaps = std::move(gaps_);
    out.fetch_times = fetch_times_;
    out.cache = std::move(cache_);
    out.freshness = std::move(freshness_);
    out.plans = std::move(plans_);
    return out;
  }

  const Trace& trace_;
  const Config& cfg_;
  SimOptions opts_;

  EnergyLedger ledger_;
  PreferenceModel preference_;
  SessionHistory sessions_;
  GapHistory gaps_;
  FetchTimeEstimator fetch_times_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t generation_ = 0;
  std::uint64_t job_token_ = 0;

  std::size_t net_idx_ = 0;
  Timestamp session_start_ = 0.0;
  std::size_t next_read_ = 0;
  std::optional<Timestamp> last_request_;
  Timestamp busy_until_ = 0.0;
  std::optional<RunningJob> running_;
  std::deque<ArticleId> piggyback_;

  Cache cache_;
  std::unordered_set<ArticleId> read_;
  MetricsReport report_;
  std::vector<FreshnessSample> freshness_;
  std::vector<PlanRecord> plans_;
};

void apply_baseline(MetricsReport& r, const MetricsReport& baseline) {
  r.baseline_bytes = baseline.demand_bytes() + baseline.prefetch_bytes;
  r.baseline_energy_joules = baseline.energy_joules;
  const std::uint64_t total = r.demand_bytes() + r.prefetch_bytes;
  if (r.baseline_bytes == 0) {
    // Nothing to compare against: 1 when nothing moved either, else the
    // transferred bytes over a one-byte floor.
    r.bandwidth_ratio = total == 0 ? 1.0 : static_cast<double>(total);
  } else {
    r.bandwidth_ratio = static_cast<double>(total) / static_cast<double>(r.baseline_bytes);
  }
  r.hb_metric = r.bandwidth_ratio > 0.0 ? r.hit_ratio / r.bandwidth_ratio : 0.0;
}

Config with_budget(Config c, std::uint64_t budget) {
  c.scheduler.budget_count = budget;
  return c;
}

MetricsReport baseline_report(const Trace& trace, const Config& config, const SimOptions& options) {
  const Config base = with_budget(config, 0);
  return Simulation(trace, base, options).run().report;
}

}  // namespace

SimOutcome simulate(const Trace& trace, const Config& config, const SimOptions& options) {
  config.validate();
  SimOutcome out = Simulation(trace, config, options).run();
  if (options.compute_baseline) {
    apply_baseline(out.report, baseline_report(trace, config, options));
  }
  return out;
}

MetricsReport run(const Trace& trace, const Config& config) {
  return simulate(trace, config).report;
}

std::vector<MetricsReport> sweep(const Trace& trace, const Config& config,
                                 std::span<const std::uint64_t> budgets) {
  config.validate();
  SimOptions opts;
  const MetricsReport baseline = baseline_report(trace, config, opts);
  std::vector<std::future<MetricsReport>> pending;
  pending.reserve(budgets.size());
  for (std::uint64_t b : budgets) {
    pending.push_back(std::async(std::launch::async, [&trace, &config, &opts, &baseline, b] {
      const Config c = with_budget(config, b);
      MetricsReport r = Simulation(trace, c, opts).run().report;
      apply_baseline(r, baseline);
      return r;
    }));
  }
  std::vector<MetricsReport> out;
  out.reserve(pending.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string sweep_csv(std::span<const std::uint64_t> budgets,
                      std::span<const MetricsReport> reports) {
  if (budgets.size() != reports.size()) {
    throw std::invalid_argument("one report per budget point is required");
  }
  std::ostringstream os;
  os << "budget,hits,H,B,hb_metric,cellular_bytes,energy_joules,mean_freshness_age_s\n";
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    const MetricsReport& r = reports[i];
    os << budgets[i] << ',' << r.hits << ',' << format_number(r.hit_ratio) << ','
       << format_number(r.bandwidth_ratio) << ',' << format_number(r.hb_metric) << ','
       << r.cellular_bytes << ',' << format_number(r.energy_joules) << ','
       << format_number(r.mean_freshness_age_s) << '\n';
  }
  return os.str();
}

nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  return nlohmann::ordered_json{
      {"reads", r.reads},
      {"hits", r.hits},
      {"misses_wifi", r.misses_wifi},
      {"misses_cell", r.misses_cell},
      {"misses_unavailable", r.misses_unavailable},
      {"hit_ratio", r.hit_ratio},
      {"cellular_bytes", r.cellular_bytes},
      {"wifi_demand_bytes", r.wifi_demand_bytes},
      {"prefetch_bytes", r.prefetch_bytes},
      {"wasted_bytes", r.wasted_bytes},
      {"prefetch_jobs_completed", r.prefetch_jobs_completed},
      {"prefetch_jobs_aborted", r.prefetch_jobs_aborted},
      {"energy_joules", r.energy_joules},
      {"baseline_energy_joules", r.baseline_energy_joules},
      {"baseline_bytes", r.baseline_bytes},
      {"bandwidth_ratio", r.bandwidth_ratio},
      {"hb_metric", r.hb_metric},
      {"mean_freshness_age_s", r.mean_freshness_age_s},
  };
}

std::string serialize_report(const MetricsReport& r) { return report_to_json(r).dump(2) + "\n"; }

bool ReportDiff::all_zero() const {
  return std::all_of(fields.begin(), fields.end(), [](const auto& f) { return f.second == 0.0; });
}

double ReportDiff::at(std::string_view name) const {
  for (const auto& [key, value] : fields) {
    if (key == name) return value;
  }
  throw std::out_of_range("no report field named " + std::string(name));
}

ReportDiff compare(const MetricsReport& a, const MetricsReport& b) {
  const auto ja = report_to_json(a);
  const auto jb = report_to_json(b);
  ReportDiff d;
  for (const auto& [key, va] : ja.items()) {
    const auto& vb = jb.at(key);
    double delta = 0.0;
    if (va.is_number_unsigned()) {
      // Exact for counts below 2^53.
      delta = static_cast<double>(vb.get<std::uint64_t>()) - static_cast<double>(va.get<std::uint64_t>());
    } else {
      delta = vb.get<double>() - va.get<double>();
    }
    d.fields.emplace_back(key, delta);
  }
  return d;
}

nlohmann::ordered_json diff_to_json(const ReportDiff& d) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, value] : d.fields) j[key] = value;
  return j;
}

nlohmann::ordered_json state_to_json(const SimOutcome& o) {
  nlohmann::json pref = o.preference;
  nlohmann::json sessions = o.sessions;
  nlohmann::json gaps = o.gaps;
  nlohmann::json fetch = o.fetch_times;
  return nlohmann::ordered_json{
      {"preference", nlohmann::ordered_json::parse(pref.dump())},
      {"sessions", nlohmann::ordered_json::parse(sessions.dump())},
      {"gaps", nlohmann::ordered_json::parse(gaps.dump())},
      {"fetch_time", nlohmann::ordered_json::parse(fetch.dump())},
      {"cached_articles", o.cache.size()},
  };
}

}  // namespace newsfetch
