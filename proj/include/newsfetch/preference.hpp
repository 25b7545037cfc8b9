#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsfetch/trace.hpp"

namespace newsfetch {

struct KeywordStoreParams {
  std::size_t capacity = 200;
  double decay = 0.7;             // multiplier per elapsed refresh period, in (0,1)
  double eviction_floor = 0.05;   // weights <= floor are dropped at refresh
  Seconds refresh_period = 86400.0;

  void validate() const;  // throws std::invalid_argument
};

// Bounded, decaying keyword-frequency profile. Capacity is enforced at
// refresh(), never by observe_read().
class KeywordStore {
 public:
  KeywordStore() = default;
  explicit KeywordStore(KeywordStoreParams params, Timestamp last_refresh = 0.0);

  // +1 per keyword occurrence (multiset).
  void observe_read(std::span<const std::string> keywords);
  void observe_read(const Article& article) { observe_read(article.keywords); }

  // Applies one decay step per whole elapsed period, evicts entries at or
  // below the floor, then trims to capacity (highest weight first, ties to
  // the lexicographically smaller keyword). Trimming also runs when no whole
  // period has elapsed, so size() <= capacity holds after every refresh.
  void refresh(Timestamp now);

  [[nodiscard]] double weight(const std::string& keyword) const;
  [[nodiscard]] double total_weight() const;
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] const std::map<std::string, double>& entries() const noexcept { return entries_; }
  [[nodiscard]] const KeywordStoreParams& params() const noexcept { return params_; }
  [[nodiscard]] Timestamp last_refresh() const noexcept { return last_refresh_; }

  // Multiplies every weight by c > 0. Test hook for scale invariance.
  void scale(double c);

  friend void to_json(nlohmann::json& j, const KeywordStore& s);
  friend void from_json(const nlohmann::json& j, KeywordStore& s);

 private:
  void trim_to_capacity();

  KeywordStoreParams params_;
  std::map<std::string, double> entries_;
  Timestamp last_refresh_ = 0.0;
};

// site -> section -> optional subsection visit counts. A node's count is its
// own direct visits plus the counts of its children.
class SiteTree {
 public:
  struct Node {
    std::uint64_t visit_count = 0;
    std::uint64_t own_visits = 0;
    std::map<std::string, Node> children;

    bool operator==(const Node&) const = default;
  };

  void observe_visit(const SitePath& path);

  // Count of the deepest node of `path` present in the tree, over
  // total_visits. 0 when the site itself is unknown or nothing was visited.
  [[nodiscard]] double path_weight(const SitePath& path) const;

  // Count of the exact node, or 0 when any level is missing.
  [[nodiscard]] std::uint64_t count(const SitePath& path) const;
  [[nodiscard]] std::uint64_t count(std::string_view site) const;
  [[nodiscard]] std::uint64_t count(std::string_view site, std::string_view section) const;

  [[nodiscard]] std::uint64_t total_visits() const noexcept { return total_visits_; }
  [[nodiscard]] const std::map<std::string, Node>& sites() const noexcept { return sites_; }

  // parent count == own visits + sum of child counts at every node, and
  // total_visits == sum of site counts.
  [[nodiscard]] bool consistent() const;

  friend void to_json(nlohmann::json& j, const SiteTree& t);
  friend void from_json(const nlohmann::json& j, SiteTree& t);

 private:
  std::map<std::string, Node> sites_;
  std::uint64_t total_visits_ = 0;
};

struct PreferenceScore {
  double value = 0.0;
  double kw_component = 0.0;
  double path_component = 0.0;
};

PreferenceScore score_article(const KeywordStore& store, const SiteTree& tree,
                              const Article& article, double alpha);

// Both halves of the learned user model.
struct PreferenceModel {
  KeywordStore keywords;
  SiteTree sites;

  void observe(const Article& read) {
    keywords.observe_read(read);
    sites.observe_visit(read.path);
  }
};

void to_json(nlohmann::json& j, const PreferenceModel& m);
void from_json(const nlohmann::json& j, PreferenceModel& m);

}  // namespace newsfetch
