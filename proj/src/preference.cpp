#include "newsfetch/preference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace newsfetch {

void KeywordStoreParams::validate() const {
  if (capacity == 0) throw std::invalid_argument("keyword capacity must be positive");
  if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("decay must lie in (0,1)");
  if (!(eviction_floor >= 0.0) || !std::isfinite(eviction_floor)) {
    throw std::invalid_argument("eviction floor must be non-negative");
  }
  if (!(refresh_period > 0.0) || !std::isfinite(refresh_period)) {
    throw std::invalid_argument("refresh period must be positive");
  }
}

KeywordStore::KeywordStore(KeywordStoreParams params, Timestamp last_refresh)
    : params_(params), last_refresh_(last_refresh) {
  params_.validate();
}

void KeywordStore::observe_read(std::span<const std::string> keywords) {
  for (const auto& k : keywords) entries_[k] += 1.0;
}

void KeywordStore::refresh(Timestamp now) {
  if (now < last_refresh_) return;
  auto periods = static_cast<std::uint64_t>(std::floor((now - last_refresh_) / params_.refresh_period));
  if (periods > 0) {
    const double factor = std::pow(params_.decay, static_cast<double>(periods));
    for (auto it = entries_.begin(); it != entries_.end();) {
      it->second *= factor;
      if (it->second <= params_.eviction_floor) {
        it = entries_.erase(it);
      } else {
        ++it;
      }
    }
    last_refresh_ += static_cast<double>(periods) * params_.refresh_period;
  }
  trim_to_capacity();
}

void KeywordStore::trim_to_capacity() {
  if (entries_.size() <= params_.capacity) return;
  std::vector<std::pair<std::string, double>> ranked(entries_.begin(), entries_.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  ranked.resize(params_.capacity);
  entries_ = std::map<std::string, double>(ranked.begin(), ranked.end());
}

double KeywordStore::weight(const std::string& keyword) const {
  auto it = entries_.find(keyword);
  return it == entries_.end() ? 0.0 : it->second;
}

double KeywordStore::total_weight() const {
  return std::accumulate(entries_.begin(), entries_.end(), 0.0,
                         [](double acc, const auto& e) { return acc + e.second; });
}

void KeywordStore::scale(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
  for (auto& [_, w] : entries_) w *= c;
}

void SiteTree::observe_visit(const SitePath& path) {
  Node& site = sites_[path.site];
  ++site.visit_count;
  Node& section = site.children[path.section];
  ++section.visit_count;
  if (path.subsection) {
    Node& sub = section.children[*path.subsection];
    ++sub.visit_count;
    ++sub.own_visits;
  } else {
    ++section.own_visits;
  }
  ++total_visits_;
}

double SiteTree::path_weight(const SitePath& path) const {
  if (total_visits_ == 0) return 0.0;
  auto site = sites_.find(path.site);
  if (site == sites_.end()) return 0.0;
  std::uint64_t deepest = site->second.visit_count;
  auto section = site->second.children.find(path.section);
  if (section != site->second.children.end()) {
    deepest = section->second.visit_count;
    if (path.subsection) {
      auto sub = section->second.children.find(*path.subsection);
      if (sub != section->second.children.end()) deepest = sub->second.visit_count;
    }
  }
  return static_cast<double>(deepest) / static_cast<double>(total_visits_);
}

std::uint64_t SiteTree::count(std::string_view site) const {
  auto it = sites_.find(std::string(site));
  return it == sites_.end() ? 0 : it->second.visit_count;
}

std::uint64_t SiteTree::count(std::string_view site, std::string_view section) const {
  auto it = sites_.find(std::string(site));
  if (it == sites_.end()) return 0;
  auto sec = it->second.children.find(std::string(section));
  return sec == it->second.children.end() ? 0 : sec->second.visit_count;
}

std::uint64_t SiteTree::count(const SitePath& path) const {
  if (!path.subsection) return count(path.site, path.section);
  auto it = sites_.find(path.site);
  if (it == sites_.end()) return 0;
  auto sec = it->second.children.find(path.section);
  if (sec == it->second.children.end()) return 0;
  auto sub = sec->second.children.find(*path.subsection);
  return sub == sec->second.children.end() ? 0 : sub->second.visit_count;
}

namespace {

bool node_consistent(const SiteTree::Node& n) {
  std::uint64_t children = 0;
  for (const auto& [_, c] : n.children) {
    if (!node_consistent(c)) return false;
    children += c.visit_count;
  }
  return n.visit_count == n.own_visits + children;
}

}  // namespace

bool SiteTree::consistent() const {
  std::uint64_t sum = 0;
  for (const auto& [_, s] : sites_) {
    if (!node_consistent(s)) return false;
    sum += s.visit_count;
  }
  return sum == total_visits_;
}

PreferenceScore score_article(const KeywordStore& store, const SiteTree& tree,
                              const Article& article, double alpha) {
  PreferenceScore s;
  const double total = store.total_weight();
  if (total > 0.0) {
    std::vector<std::string> distinct(article.keywords);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    double overlap = 0.0;
    for (const auto& k : distinct) overlap += store.weight(k);
    s.kw_component = std::clamp(overlap / total, 0.0, 1.0);
  }
  s.path_component = std::clamp(tree.path_weight(article.path), 0.0, 1.0);
  s.value = alpha * s.kw_component + (1.0 - alpha) * s.path_component;
  s.value = std::clamp(s.value, 0.0, 1.0);
  return s;
}

// JSON

void to_json(nlohmann::json& j, const KeywordStore& s) {
  j = nlohmann::json{{"capacity", s.params_.capacity},
                     {"decay", s.params_.decay},
                     {"eviction_floor", s.params_.eviction_floor},
                     {"refresh_period_s", s.params_.refresh_period},
                     {"last_refresh", s.last_refresh_},
                     {"entries", s.entries_}};
}

void from_json(const nlohmann::json& j, KeywordStore& s) {
  KeywordStoreParams p;
  p.capacity = j.at("capacity").get<std::size_t>();
  p.decay = j.at("decay").get<double>();
  p.eviction_floor = j.at("eviction_floor").get<double>();
  p.refresh_period = j.at("refresh_period_s").get<double>();
  s = KeywordStore(p, j.at("last_refresh").get<double>());
  s.entries_ = j.at("entries").get<std::map<std::string, double>>();
}

namespace {

nlohmann::json node_to_json(const SiteTree::Node& n) {
  nlohmann::json j{{"visit_count", n.visit_count}, {"own_visits", n.own_visits}};
  if (!n.children.empty()) {
    nlohmann::json kids = nlohmann::json::object();
    for (const auto& [name, c] : n.children) kids[name] = node_to_json(c);
    j["children"] = std::move(kids);
  }
  return j;
}

SiteTree::Node node_from_json(const nlohmann::json& j) {
  SiteTree::Node n;
  n.visit_count = j.at("visit_count").get<std::uint64_t>();
  n.own_visits = j.at("own_visits").get<std::uint64_t>();
  if (auto it = j.find("children"); it != j.end()) {
    for (const auto& [name, c] : it->items()) n.children.emplace(name, node_from_json(c));
  }
  return n;
}

}  // namespace

void to_json(nlohmann::json& j, const SiteTree& t) {
  nlohmann::json sites = nlohmann::json::object();
  for (const auto& [name, n] : t.sites_) sites[name] = node_to_json(n);
  j = nlohmann::json{{"total_visits", t.total_visits_}, {"sites", std::move(sites)}};
}

void from_json(const nlohmann::json& j, SiteTree& t) {
  t = SiteTree{};
  t.total_visits_ = j.at("total_visits").get<std::uint64_t>();
  for (const auto& [name, n] : j.at("sites").items()) t.sites_.emplace(name, node_from_json(n));
}

void to_json(nlohmann::json& j, const PreferenceModel& m) {
  j = nlohmann::json{{"keywords", m.keywords}, {"sites", m.sites}};
}

void from_json(const nlohmann::json& j, PreferenceModel& m) {
  m.keywords = j.at("keywords").get<KeywordStore>();
  m.sites = j.at("sites").get<SiteTree>();
}

}  // namespace newsfetch
