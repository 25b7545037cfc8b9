#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "newsfetch/trace.hpp"

namespace newsfetch::testing {

inline Article make_article(std::string id, Timestamp published, std::vector<std::string> keywords,
                            std::uint64_t size = 1000, std::string site = "newsX",
                            std::string section = "tech",
                            std::optional<std::string> subsection = std::nullopt) {
  Article a;
  a.id = std::move(id);
  a.published_at = published;
  a.keywords = std::move(keywords);
  a.size_bytes = size;
  a.path = SitePath{std::move(site), std::move(section), std::move(subsection)};
  return a;
}

inline NetInterval wifi(Timestamp start, Timestamp end, double bw = 1000.0, std::string ap = "home") {
  return NetInterval{NetKind::WiFi, start, end, bw, std::move(ap)};
}

inline NetInterval cell(Timestamp start, Timestamp end, double bw = 1000.0) {
  return NetInterval{NetKind::Cellular, start, end, bw, std::nullopt};
}

inline NetInterval none(Timestamp start, Timestamp end) {
  return NetInterval{NetKind::None, start, end, std::nullopt, std::nullopt};
}

inline Trace make_trace(std::vector<Article> articles, std::vector<ReadEvent> reads,
                        std::vector<NetInterval> network) {
  Trace t;
  t.articles = std::move(articles);
  t.reads = std::move(reads);
  t.network = std::move(network);
  validate_trace(t);
  return t;
}

// Fresh per-test scratch directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("newsfetch_" + name + "_" +
                                                       std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace newsfetch::testing
