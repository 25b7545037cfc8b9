#include "newsfetch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace newsfetch {

namespace {

constexpr double kDay = 86'400.0;
constexpr double kHour = 3'600.0;

std::string numbered(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, n);
  return buf;
}

std::string keyword_name(std::uint32_t rank) { return numbered("kw", rank, 4); }
std::string site_name(std::uint32_t i) { return numbered("site", i, 0); }
std::string section_name(std::uint32_t i) { return numbered("sec", i, 0); }
std::string subsection_name(std::uint32_t i) { return numbered("sub", i, 0); }

// Picks k distinct values out of [0, n) in a seeded order.
std::vector<std::uint32_t> sample_distinct(std::mt19937_64& rng, std::uint32_t n, std::uint32_t k) {
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0U);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(n, k));
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<NetInterval> build_network(const SynthParams& p, double horizon) {
  std::vector<NetInterval> raw;
  auto fill_gap = [&](double a, double b) {
    if (!(b > a)) return;
    const double split = a + p.none_fraction * (b - a);
    if (split > a) raw.push_back({NetKind::None, a, split, std::nullopt, std::nullopt});
    if (b > split) raw.push_back({NetKind::Cellular, split, b, p.cell_bandwidth, std::nullopt});
  };
  double cursor = 0.0;
  for (std::uint32_t d = 0; d < p.days; ++d) {
    for (const auto& s : p.wifi_sessions) {
      const double start = d * kDay + s.start_hour * kHour;
      const double end = std::min(start + s.duration_hours * kHour, horizon);
      if (!(end > start)) continue;
      fill_gap(cursor, start);
      raw.push_back({NetKind::WiFi, start, end, p.wifi_bandwidth, s.ap_id});
      cursor = end;
    }
  }
  fill_gap(cursor, horizon);

  // Join stretches that continue across midnight on the same network.
  std::vector<NetInterval> out;
  for (auto& n : raw) {
    if (!out.empty() && out.back().kind == n.kind && out.back().ap_id == n.ap_id &&
        out.back().bandwidth_bytes_per_s == n.bandwidth_bytes_per_s && out.back().end == n.start) {
      out.back().end = n.end;
    } else {
      out.push_back(std::move(n));
    }
  }
  return out;
}

}  // namespace

void SynthParams::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (days == 0) fail("days must be positive");
  if (vocab_size == 0) fail("vocab_size must be positive");
  if (!(zipf_exponent > 0.0)) fail("zipf_exponent must be positive");
  if (sites == 0 || sections_per_site == 0) fail("sites and sections_per_site must be positive");
  if (!(reads_per_day >= 0.0) || !std::isfinite(reads_per_day)) fail("reads_per_day must be >= 0");
  if (article_bytes_min == 0 || article_bytes_min > article_bytes_max) {
    fail("article sizes need 1 <= min <= max");
  }
  if (keywords_min == 0 || keywords_min > keywords_max) fail("keyword counts need 1 <= min <= max");
  if (!(wifi_bandwidth > 0.0) || !(cell_bandwidth > 0.0)) fail("bandwidths must be positive");
  if (!(none_fraction >= 0.0 && none_fraction <= 1.0)) fail("none_fraction must lie in [0,1]");
  if (interest_keywords > interest_pool || interest_pool > vocab_size) {
    fail("need interest_keywords <= interest_pool <= vocab_size");
  }
  if (interest_sections > sites * sections_per_site) fail("interest_sections exceeds section count");
  if (!(read_window_s > 0.0)) fail("read_window_s must be positive");
  double prev_end = 0.0;
  for (const auto& s : wifi_sessions) {
    if (s.ap_id.empty()) fail("wifi session needs an ap_id");
    if (!(s.duration_hours > 0.0) || s.start_hour < prev_end || s.start_hour + s.duration_hours > 24.0) {
      fail("wifi sessions must be sorted, non-overlapping and inside one day");
    }
    prev_end = s.start_hour + s.duration_hours;
  }
}

SynthResult generate_with_truth(const SynthParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  const double horizon = p.days * kDay;

  SynthResult result;
  Trace& trace = result.trace;

  // Latent interests: keywords from the popular end of the vocabulary, plus
  // a few (site, section) pairs.
  std::set<std::uint32_t> liked_kw;
  for (std::uint32_t r : sample_distinct(rng, p.interest_pool, p.interest_keywords)) {
    liked_kw.insert(r + 1);
    result.truth.keywords.push_back(keyword_name(r + 1));
  }
  std::set<std::uint32_t> liked_sections;
  for (std::uint32_t s : sample_distinct(rng, p.sites * p.sections_per_site, p.interest_sections)) {
    liked_sections.insert(s);
    result.truth.sections.push_back(
        {site_name(s / p.sections_per_site), section_name(s % p.sections_per_site), std::nullopt});
  }

  std::vector<double> zipf(p.vocab_size);
  for (std::uint32_t r = 0; r < p.vocab_size; ++r) {
    zipf[r] = 1.0 / std::pow(static_cast<double>(r + 1), p.zipf_exponent);
  }
  std::discrete_distribution<std::uint32_t> keyword_dist(zipf.begin(), zipf.end());
  std::uniform_int_distribution<std::uint32_t> kw_count(p.keywords_min, p.keywords_max);
  std::uniform_int_distribution<std::uint32_t> site_dist(0, p.sites - 1);
  std::uniform_int_distribution<std::uint32_t> section_dist(0, p.sections_per_site - 1);
  std::uniform_int_distribution<std::uint32_t> sub_dist(0, std::max(1U, p.subsections_per_section) - 1);
  std::bernoulli_distribution has_sub(0.7);
  std::uniform_int_distribution<std::uint64_t> size_dist(p.article_bytes_min, p.article_bytes_max);
  std::uniform_real_distribution<double> within_day(0.0, kDay);

  struct Draft {
    Article article;
    double affinity;
  };
  std::vector<Draft> drafts;
  drafts.reserve(static_cast<std::size_t>(p.days) * p.articles_per_day);
  for (std::uint32_t d = 0; d < p.days; ++d) {
    for (std::uint32_t i = 0; i < p.articles_per_day; ++i) {
      Draft draft;
      Article& a = draft.article;
      a.published_at = d * kDay + within_day(rng);
      const std::uint32_t site = site_dist(rng);
      const std::uint32_t section = section_dist(rng);
      a.path.site = site_name(site);
      a.path.section = section_name(section);
      if (p.subsections_per_section > 0 && has_sub(rng)) a.path.subsection = subsection_name(sub_dist(rng));
      const std::uint32_t n = kw_count(rng);
      std::set<std::uint32_t> distinct;
      for (std::uint32_t k = 0; k < n; ++k) {
        const std::uint32_t rank = keyword_dist(rng) + 1;
        a.keywords.push_back(keyword_name(rank));
        distinct.insert(rank);
      }
      a.size_bytes = size_dist(rng);
      double hits = 0.0;
      for (std::uint32_t r : distinct) hits += liked_kw.contains(r) ? 1.0 : 0.0;
      if (liked_sections.contains(site * p.sections_per_site + section)) hits += 2.0;
      draft.affinity = hits;
      drafts.push_back(std::move(draft));
    }
  }
  std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& x, const Draft& y) {
    return x.article.published_at < y.article.published_at;
  });
  for (std::size_t i = 0; i < drafts.size(); ++i) drafts[i].article.id = numbered("a", i + 1, 6);

  // Reads: Poisson arrivals, each choosing an unread recent article with
  // weight growing in its latent affinity.
  std::vector<bool> read(drafts.size(), false);
  if (p.reads_per_day > 0.0 && !drafts.empty()) {
    std::exponential_distribution<double> inter_arrival(p.reads_per_day / kDay);
    double t = inter_arrival(rng);
    std::size_t published = 0;
    std::vector<std::size_t> eligible;
    std::vector<double> weights;
    while (t <= horizon) {
      while (published < drafts.size() && drafts[published].article.published_at <= t) ++published;
      eligible.clear();
      weights.clear();
      for (std::size_t i = 0; i < published; ++i) {
        if (read[i] || t - drafts[i].article.published_at > p.read_window_s) continue;
        eligible.push_back(i);
        weights.push_back(0.02 + drafts[i].affinity * drafts[i].affinity);
      }
      if (!eligible.empty()) {
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        const std::size_t chosen = eligible[pick(rng)];
        read[chosen] = true;
        trace.reads.push_back({t, drafts[chosen].article.id});
      }
      t += inter_arrival(rng);
    }
  }

  for (auto& d : drafts) trace.articles.push_back(std::move(d.article));
  trace.network = build_network(p, horizon);
  validate_trace(trace);
  return result;
}

Trace generate(const SynthParams& params) { return generate_with_truth(params).trace; }

SynthParams synth_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("synth params must be a JSON object");
  SynthParams p;
  static const std::set<std::string> known{
      "seed", "days", "vocab_size", "zipf_exponent", "sites", "sections_per_site",
      "subsections_per_section", "articles_per_day", "reads_per_day", "wifi_sessions",
      "article_bytes", "keywords_per_article", "wifi_bandwidth", "cell_bandwidth",
      "none_fraction", "interest_keywords", "interest_sections", "interest_pool",
      "read_window_s"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown synth param \"" + key + "\"");
  }
  try {
    auto get = [&j](const char* key, auto& out) {
      if (auto it = j.find(key); it != j.end()) it->get_to(out);
    };
    get("seed", p.seed);
    get("days", p.days);
    get("vocab_size", p.vocab_size);
    get("zipf_exponent", p.zipf_exponent);
    get("sites", p.sites);
    get("sections_per_site", p.sections_per_site);
    get("subsections_per_section", p.subsections_per_section);
    get("articles_per_day", p.articles_per_day);
    get("reads_per_day", p.reads_per_day);
    get("wifi_bandwidth", p.wifi_bandwidth);
    get("cell_bandwidth", p.cell_bandwidth);
    get("none_fraction", p.none_fraction);
    get("interest_keywords", p.interest_keywords);
    get("interest_sections", p.interest_sections);
    get("interest_pool", p.interest_pool);
    get("read_window_s", p.read_window_s);
    if (auto it = j.find("article_bytes"); it != j.end()) {
      p.article_bytes_min = it->at(0).get<std::uint64_t>();
      p.article_bytes_max = it->at(1).get<std::uint64_t>();
    }
    if (auto it = j.find("keywords_per_article"); it != j.end()) {
      p.keywords_min = it->at(0).get<std::uint32_t>();
      p.keywords_max = it->at(1).get<std::uint32_t>();
    }
    if (auto it = j.find("wifi_sessions"); it != j.end()) {
      p.wifi_sessions.clear();
      for (const auto& s : *it) {
        p.wifi_sessions.push_back({s.at("start_hour").get<double>(),
                                   s.at("duration_hours").get<double>(),
                                   s.at("ap_id").get<std::string>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad synth params: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace newsfetch
