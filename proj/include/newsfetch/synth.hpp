#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "newsfetch/trace.hpp"

namespace newsfetch {

struct WifiSessionTemplate {
  double start_hour = 0.0;
  double duration_hours = 1.0;
  std::string ap_id;
};

struct SynthParams {
  std::uint64_t seed = 42;
  std::uint32_t days = 7;
  std::uint32_t vocab_size = 500;
  double zipf_exponent = 1.0;
  std::uint32_t sites = 4;
  std::uint32_t sections_per_site = 6;
  std::uint32_t subsections_per_section = 2;  // 0: no subsections
  std::uint32_t articles_per_day = 100;
  double reads_per_day = 20.0;  // Poisson mean
  // Repeated every day. Must be sorted, non-overlapping, inside [0, 24h].
  std::vector<WifiSessionTemplate> wifi_sessions{
      {0.0, 7.5, "home"}, {9.0, 8.0, "work"}, {21.0, 3.0, "home"}};
  std::uint64_t article_bytes_min = 20'000;
  std::uint64_t article_bytes_max = 200'000;
  std::uint32_t keywords_min = 3;
  std::uint32_t keywords_max = 8;
  double wifi_bandwidth = 500'000.0;
  double cell_bandwidth = 100'000.0;
  // Leading share of each gap between WiFi sessions with no connectivity;
  // the rest is cellular.
  double none_fraction = 0.25;
  // Size of the latent user's interest sets.
  std::uint32_t interest_keywords = 15;
  std::uint32_t interest_sections = 3;
  // Liked keywords are drawn from this many most popular vocabulary ranks.
  std::uint32_t interest_pool = 45;
  // Readers only pick articles at most this old.
  double read_window_s = 86'400.0;

  void validate() const;  // throws std::invalid_argument
};

// The latent preference the reads were drawn from.
struct SynthTruth {
  std::vector<std::string> keywords;
  std::vector<SitePath> sections;  // site + section, no subsection
};

struct SynthResult {
  Trace trace;
  SynthTruth truth;
};

SynthResult generate_with_truth(const SynthParams& params);
Trace generate(const SynthParams& params);

// Missing keys keep defaults; unknown keys throw std::invalid_argument.
SynthParams synth_params_from_json(const nlohmann::json& j);

}  // namespace newsfetch
