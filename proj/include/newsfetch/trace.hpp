#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace newsfetch {

// Seconds since the trace epoch.
using Timestamp = double;
using Seconds = double;
using ArticleId = std::string;

struct SitePath {
  std::string site;
  std::string section;
  std::optional<std::string> subsection;

  bool operator==(const SitePath&) const = default;
};

struct Article {
  ArticleId id;
  Timestamp published_at = 0.0;
  SitePath path;
  // Multiset: duplicates are meaningful to observe_read.
  std::vector<std::string> keywords;
  std::uint64_t size_bytes = 1;

  bool operator==(const Article&) const = default;
};

struct ReadEvent {
  Timestamp at = 0.0;
  ArticleId article_id;

  bool operator==(const ReadEvent&) const = default;
};

enum class NetKind { WiFi, Cellular, None };

std::string_view to_string(NetKind kind);

// Half-open interval [start, end).
struct NetInterval {
  NetKind kind = NetKind::None;
  Timestamp start = 0.0;
  Timestamp end = 0.0;
  std::optional<double> bandwidth_bytes_per_s;  // absent iff kind == None
  std::optional<std::string> ap_id;             // present iff kind == WiFi

  bool operator==(const NetInterval&) const = default;
};

struct Trace {
  Timestamp horizon = 0.0;
  std::vector<Article> articles;  // sorted by (published_at, id)
  std::vector<ReadEvent> reads;   // sorted by at
  std::vector<NetInterval> network;

  bool operator==(const Trace&) const = default;

  // Index into `articles`; throws TraceError(UnknownArticle) when absent.
  [[nodiscard]] const Article& article(std::string_view id) const;
  [[nodiscard]] const Article* find_article(std::string_view id) const;

  // Must be called after `articles` changes; parse_trace does it.
  void reindex();

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

enum class TraceErrorKind {
  EmptyTrace,
  MalformedLine,
  DuplicateArticle,
  UnknownArticle,
  ReadBeforePublication,
  NetworkOverlap,
  NetworkGap,
  BeyondHorizon,
  OutOfRange,
};

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceErrorKind kind, const std::string& message,
             std::size_t line = 0);

  [[nodiscard]] TraceErrorKind kind() const noexcept { return kind_; }
  // 1-based line number in the source file, 0 when not tied to a line.
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  TraceErrorKind kind_;
  std::size_t line_;
};

Trace parse_trace(std::istream& in);
Trace parse_trace(std::string_view text);

// Inverse of parse_trace: articles, then network, then reads, one JSON object
// per line.
std::string serialize_trace(const Trace& trace);

// Checks every Trace invariant, throwing TraceError on the first violation.
// Sorts and reindexes in place.
void validate_trace(Trace& trace);

// The interval with start <= t < end; at t == horizon, the last interval.
const NetInterval& network_at(const Trace& trace, Timestamp t);

}  // namespace newsfetch
