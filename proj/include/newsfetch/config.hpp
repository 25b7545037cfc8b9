#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "newsfetch/energy.hpp"
#include "newsfetch/netpredict.hpp"
#include "newsfetch/preference.hpp"
#include "newsfetch/scheduler.hpp"

namespace newsfetch {

// Everything one simulation run reads. Loaded from a single JSON document
// with sections "energy", "scheduler", "preference", "predictor" and a
// top-level "seed". Missing fields keep their defaults; unknown ones are
// rejected.
struct Config {
  EnergyParams energy;
  SchedulerConfig scheduler;  // alpha and min_score live under "preference"
  KeywordStoreParams preference;
  PredictorParams predictor;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Config config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const Config& c);

// Throws ConfigError for malformed content, std::ios_base::failure when the
// file cannot be read.
Config load_config(const std::filesystem::path& path);

}  // namespace newsfetch
