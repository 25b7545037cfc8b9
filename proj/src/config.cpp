#include "newsfetch/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace newsfetch {

namespace {

using nlohmann::json;

// Reads optional fields out of one config section, rejecting unknown keys.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    auto it = root.find(name);
    if (it == root.end()) return;
    if (!it->is_object()) throw ConfigError(std::string("\"") + name + "\" must be an object");
    obj_ = &*it;
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "must be a number");
      out = v->get<double>();
    }
  }

  void count(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                      v->get<std::int64_t>() < 0)) {
        fail(key, "must be a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  template <typename Enum>
  void choice(const char* key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> options) {
    if (const json* v = take(key)) {
      if (v->is_string()) {
        for (const auto& [label, value] : options) {
          if (v->get<std::string>() == label) {
            out = value;
            return;
          }
        }
      }
      fail(key, "has an unsupported value");
    }
  }

  void finish() const {
    if (obj_ == nullptr) return;
    for (const auto& [key, _] : obj_->items()) {
      if (!seen_.contains(key)) {
        throw ConfigError(std::string("unknown field \"") + name_ + "." + key + "\"");
      }
    }
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    if (obj_ == nullptr) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigError(std::string("\"") + name_ + "." + key + "\" " + what);
  }

  const char* name_;
  const json* obj_ = nullptr;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace

void Config::validate() const {
  try {
    energy.validate();
    scheduler.validate();
    preference.validate();
    predictor.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Config config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "energy" && key != "scheduler" && key != "preference" && key != "predictor" &&
        key != "seed") {
      throw ConfigError("unknown config section \"" + key + "\"");
    }
  }
  Config c;

  Section e(j, "energy");
  e.number("p_idle", c.energy.p_idle);
  e.number("p_active_wifi", c.energy.p_active_wifi);
  e.number("p_active_cell", c.energy.p_active_cell);
  e.number("p_tail_wifi", c.energy.p_tail_wifi);
  e.number("p_tail_cell", c.energy.p_tail_cell);
  e.number("t_tail_wifi", c.energy.t_tail_wifi);
  e.number("t_tail_cell", c.energy.t_tail_cell);
  e.finish();

  Section s(j, "scheduler");
  s.count("budget_count", c.scheduler.budget_count);
  s.count("budget_bytes", c.scheduler.budget_bytes);
  s.number("safety_margin_s", c.scheduler.safety_margin_s);
  s.number("max_article_age_s", c.scheduler.max_article_age_s);
  s.choice("ranking", c.scheduler.ranking,
           {{"preference", Ranking::Preference}, {"random", Ranking::Random}});
  s.choice("timing", c.scheduler.timing, {{"delayed", Timing::Delayed}, {"eager", Timing::Eager}});
  s.finish();

  Section p(j, "preference");
  std::uint64_t capacity = c.preference.capacity;
  p.count("capacity", capacity);
  c.preference.capacity = static_cast<std::size_t>(capacity);
  p.number("decay", c.preference.decay);
  p.number("eviction_floor", c.preference.eviction_floor);
  p.number("refresh_period_s", c.preference.refresh_period);
  p.number("alpha", c.scheduler.alpha);
  p.number("min_score", c.scheduler.min_score);
  p.finish();

  Section q(j, "predictor");
  q.number("session_quantile", c.predictor.session_quantile);
  q.number("gap_quantile", c.predictor.gap_quantile);
  q.number("cold_start_session_s", c.predictor.cold_start_session);
  q.number("cold_start_gap_s", c.predictor.cold_start_gap);
  q.number("cold_start_fetch_s", c.predictor.cold_start_fetch);
  q.finish();

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw ConfigError("\"seed\" must be a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  }
  c.scheduler.ranking_seed = c.seed;
  c.validate();
  return c;
}

nlohmann::ordered_json config_to_json(const Config& c) {
  return nlohmann::ordered_json{
      {"energy",
       {{"p_idle", c.energy.p_idle},
        {"p_active_wifi", c.energy.p_active_wifi},
        {"p_active_cell", c.energy.p_active_cell},
        {"p_tail_wifi", c.energy.p_tail_wifi},
        {"p_tail_cell", c.energy.p_tail_cell},
        {"t_tail_wifi", c.energy.t_tail_wifi},
        {"t_tail_cell", c.energy.t_tail_cell}}},
      {"scheduler",
       {{"budget_count", c.scheduler.budget_count},
        {"budget_bytes", c.scheduler.budget_bytes},
        {"safety_margin_s", c.scheduler.safety_margin_s},
        {"max_article_age_s", c.scheduler.max_article_age_s},
        {"ranking", c.scheduler.ranking == Ranking::Random ? "random" : "preference"},
        {"timing", c.scheduler.timing == Timing::Eager ? "eager" : "delayed"}}},
      {"preference",
       {{"capacity", c.preference.capacity},
        {"decay", c.preference.decay},
        {"eviction_floor", c.preference.eviction_floor},
        {"refresh_period_s", c.preference.refresh_period},
        {"alpha", c.scheduler.alpha},
        {"min_score", c.scheduler.min_score}}},
      {"predictor",
       {{"session_quantile", c.predictor.session_quantile},
        {"gap_quantile", c.predictor.gap_quantile},
        {"cold_start_session_s", c.predictor.cold_start_session},
        {"cold_start_gap_s", c.predictor.cold_start_gap},
        {"cold_start_fetch_s", c.predictor.cold_start_fetch}}},
      {"seed", c.seed}};
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace newsfetch
