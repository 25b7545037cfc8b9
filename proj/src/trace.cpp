#include "newsfetch/trace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace newsfetch {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw TraceError(TraceErrorKind::MalformedLine,
                   "line " + std::to_string(line) + ": " + what, line);
}

void require_only(const json& obj, std::initializer_list<std::string_view> allowed,
                  std::size_t line) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      malformed(line, "unknown field \"" + key + "\"");
    }
  }
}

const json& field(const json& obj, const char* name, std::size_t line) {
  auto it = obj.find(name);
  if (it == obj.end()) malformed(line, std::string("missing field \"") + name + "\"");
  return *it;
}

std::string identifier(const json& obj, const char* name, std::size_t line) {
  const json& v = field(obj, name, line);
  if (!v.is_string()) malformed(line, std::string("\"") + name + "\" must be a string");
  auto s = v.get<std::string>();
  if (s.empty()) malformed(line, std::string("\"") + name + "\" must be non-empty");
  return s;
}

double number(const json& obj, const char* name, std::size_t line) {
  const json& v = field(obj, name, line);
  if (!v.is_number()) malformed(line, std::string("\"") + name + "\" must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) malformed(line, std::string("\"") + name + "\" must be finite");
  return d;
}

Timestamp timestamp(const json& obj, const char* name, std::size_t line) {
  double d = number(obj, name, line);
  if (d < 0.0) malformed(line, std::string("\"") + name + "\" must be >= 0");
  return d;
}

bool is_lowercase_token(const std::string& s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isupper(c) || std::isspace(c);
  });
}

struct Pending {
  Trace trace;
  std::vector<std::size_t> read_lines;
  std::unordered_map<std::string, std::size_t> article_lines;
};

void parse_article(const json& obj, std::size_t line, Pending& out) {
  require_only(obj, {"type", "id", "published_at", "site", "section", "subsection",
                     "keywords", "size_bytes"},
               line);
  Article a;
  a.id = identifier(obj, "id", line);
  a.published_at = timestamp(obj, "published_at", line);
  a.path.site = identifier(obj, "site", line);
  a.path.section = identifier(obj, "section", line);
  if (obj.contains("subsection")) a.path.subsection = identifier(obj, "subsection", line);

  const json& kws = field(obj, "keywords", line);
  if (!kws.is_array()) malformed(line, "\"keywords\" must be an array");
  if (kws.empty()) malformed(line, "article has no keywords");
  for (const json& k : kws) {
    if (!k.is_string() || !is_lowercase_token(k.get<std::string>())) {
      malformed(line, "keywords must be non-empty lowercase strings");
    }
    a.keywords.push_back(k.get<std::string>());
  }

  const json& size = field(obj, "size_bytes", line);
  if (!size.is_number_integer()) malformed(line, "\"size_bytes\" must be an integer");
  if (size.is_number_unsigned() ? size.get<std::uint64_t>() == 0 : size.get<std::int64_t>() < 1) {
    malformed(line, "\"size_bytes\" must be >= 1");
  }
  a.size_bytes = size.get<std::uint64_t>();

  if (auto [it, inserted] = out.article_lines.emplace(a.id, line); !inserted) {
    throw TraceError(TraceErrorKind::DuplicateArticle,
                     "line " + std::to_string(line) + ": duplicate article id \"" + a.id +
                         "\" (first defined on line " + std::to_string(it->second) + ")",
                     line);
  }
  out.trace.articles.push_back(std::move(a));
}

void parse_read(const json& obj, std::size_t line, Pending& out) {
  require_only(obj, {"type", "at", "article_id"}, line);
  ReadEvent r;
  r.at = timestamp(obj, "at", line);
  r.article_id = identifier(obj, "article_id", line);
  out.trace.reads.push_back(std::move(r));
  out.read_lines.push_back(line);
}

void parse_net(const json& obj, std::size_t line, Pending& out) {
  NetInterval n;
  std::string kind = identifier(obj, "kind", line);
  if (kind == "wifi") {
    require_only(obj, {"type", "kind", "start", "end", "bandwidth_bytes_per_s", "ap_id"}, line);
    n.kind = NetKind::WiFi;
    n.ap_id = identifier(obj, "ap_id", line);
  } else if (kind == "cell") {
    require_only(obj, {"type", "kind", "start", "end", "bandwidth_bytes_per_s"}, line);
    n.kind = NetKind::Cellular;
  } else if (kind == "none") {
    require_only(obj, {"type", "kind", "start", "end"}, line);
    n.kind = NetKind::None;
  } else {
    malformed(line, "unknown network kind \"" + kind + "\"");
  }
  n.start = timestamp(obj, "start", line);
  n.end = timestamp(obj, "end", line);
  if (!(n.start < n.end)) malformed(line, "network interval needs start < end");
  if (n.kind != NetKind::None) {
    double bw = number(obj, "bandwidth_bytes_per_s", line);
    if (bw <= 0.0) malformed(line, "\"bandwidth_bytes_per_s\" must be positive");
    n.bandwidth_bytes_per_s = bw;
  }
  out.trace.network.push_back(std::move(n));
}

void sort_records(Trace& t) {
  std::stable_sort(t.articles.begin(), t.articles.end(), [](const Article& a, const Article& b) {
    if (a.published_at != b.published_at) return a.published_at < b.published_at;
    return a.id < b.id;
  });
  std::stable_sort(t.reads.begin(), t.reads.end(),
                   [](const ReadEvent& a, const ReadEvent& b) { return a.at < b.at; });
  std::stable_sort(t.network.begin(), t.network.end(),
                   [](const NetInterval& a, const NetInterval& b) { return a.start < b.start; });
}

std::string fmt_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

}  // namespace

std::string_view to_string(NetKind kind) {
  switch (kind) {
    case NetKind::WiFi:
      return "wifi";
    case NetKind::Cellular:
      return "cell";
    case NetKind::None:
      return "none";
  }
  return "none";
}

TraceError::TraceError(TraceErrorKind kind, const std::string& message, std::size_t line)
    : std::runtime_error(message), kind_(kind), line_(line) {}

const Article* Trace::find_article(std::string_view id) const {
  if (index_.size() != articles.size()) {
    // Index is stale (trace assembled by hand); fall back to a scan.
    auto it = std::find_if(articles.begin(), articles.end(),
                           [&](const Article& a) { return a.id == id; });
    return it == articles.end() ? nullptr : &*it;
  }
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &articles[it->second];
}

const Article& Trace::article(std::string_view id) const {
  if (const Article* a = find_article(id)) return *a;
  throw TraceError(TraceErrorKind::UnknownArticle,
                   "unknown article \"" + std::string(id) + "\"");
}

void Trace::reindex() {
  index_.clear();
  index_.reserve(articles.size());
  for (std::size_t i = 0; i < articles.size(); ++i) index_.emplace(articles[i].id, i);
}

void validate_trace(Trace& t) {
  sort_records(t);

  if (t.network.empty()) {
    throw TraceError(TraceErrorKind::NetworkGap, "trace has no network intervals");
  }
  if (t.network.front().start != 0.0) {
    throw TraceError(TraceErrorKind::NetworkGap,
                     "network coverage must start at 0, first interval starts at " +
                         fmt_time(t.network.front().start));
  }
  for (std::size_t i = 1; i < t.network.size(); ++i) {
    const auto& prev = t.network[i - 1];
    const auto& cur = t.network[i];
    if (cur.start < prev.end) {
      throw TraceError(TraceErrorKind::NetworkOverlap,
                       "network intervals overlap at " + fmt_time(cur.start));
    }
    if (cur.start > prev.end) {
      throw TraceError(TraceErrorKind::NetworkGap, "network coverage has a gap [" +
                                                       fmt_time(prev.end) + ", " +
                                                       fmt_time(cur.start) + ")");
    }
  }
  t.horizon = t.network.back().end;

  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < t.articles.size(); ++i) {
    const auto& a = t.articles[i];
    if (!seen.emplace(a.id, i).second) {
      throw TraceError(TraceErrorKind::DuplicateArticle, "duplicate article id \"" + a.id + "\"");
    }
    if (a.keywords.empty()) {
      throw TraceError(TraceErrorKind::MalformedLine, "article \"" + a.id + "\" has no keywords");
    }
    if (a.size_bytes < 1) {
      throw TraceError(TraceErrorKind::MalformedLine, "article \"" + a.id + "\" has zero size");
    }
    if (a.published_at > t.horizon) {
      throw TraceError(TraceErrorKind::BeyondHorizon,
                       "article \"" + a.id + "\" published after the horizon");
    }
  }
  t.reindex();

  for (const auto& r : t.reads) {
    const Article* a = t.find_article(r.article_id);
    if (a == nullptr) {
      throw TraceError(TraceErrorKind::UnknownArticle,
                       "read references unknown article \"" + r.article_id + "\"");
    }
    if (r.at < a->published_at) {
      throw TraceError(TraceErrorKind::ReadBeforePublication,
                       "read precedes publication of \"" + r.article_id + "\"");
    }
    if (r.at > t.horizon) {
      throw TraceError(TraceErrorKind::BeyondHorizon, "read at " + fmt_time(r.at) +
                                                          " is beyond the horizon");
    }
  }
}

Trace parse_trace(std::istream& in) {
  Pending p;
  std::string text;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      malformed(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(line_no, "record must be a JSON object");
    std::string type = identifier(obj, "type", line_no);
    if (type == "article") {
      parse_article(obj, line_no, p);
    } else if (type == "read") {
      parse_read(obj, line_no, p);
    } else if (type == "net") {
      parse_net(obj, line_no, p);
    } else {
      malformed(line_no, "unknown record type \"" + type + "\"");
    }
    ++records;
  }
  if (records == 0) throw TraceError(TraceErrorKind::EmptyTrace, "empty trace");

  // Attribute read errors to their source line before the records are sorted.
  for (std::size_t i = 0; i < p.trace.reads.size(); ++i) {
    const auto& r = p.trace.reads[i];
    auto it = p.article_lines.find(r.article_id);
    std::size_t line = p.read_lines[i];
    if (it == p.article_lines.end()) {
      throw TraceError(TraceErrorKind::UnknownArticle,
                       "line " + std::to_string(line) + ": read references unknown article \"" +
                           r.article_id + "\"",
                       line);
    }
  }
  validate_trace(p.trace);
  return std::move(p.trace);
}

Trace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

std::string serialize_trace(const Trace& trace) {
  std::string out;
  auto emit = [&out](const ordered_json& j) {
    out += j.dump();
    out += '\n';
  };
  for (const auto& a : trace.articles) {
    ordered_json j;
    j["type"] = "article";
    j["id"] = a.id;
    j["published_at"] = a.published_at;
    j["site"] = a.path.site;
    j["section"] = a.path.section;
    if (a.path.subsection) j["subsection"] = *a.path.subsection;
    j["keywords"] = a.keywords;
    j["size_bytes"] = a.size_bytes;
    emit(j);
  }
  for (const auto& n : trace.network) {
    ordered_json j;
    j["type"] = "net";
    j["kind"] = std::string(to_string(n.kind));
    j["start"] = n.start;
    j["end"] = n.end;
    if (n.bandwidth_bytes_per_s) j["bandwidth_bytes_per_s"] = *n.bandwidth_bytes_per_s;
    if (n.ap_id) j["ap_id"] = *n.ap_id;
    emit(j);
  }
  for (const auto& r : trace.reads) {
    ordered_json j;
    j["type"] = "read";
    j["at"] = r.at;
    j["article_id"] = r.article_id;
    emit(j);
  }
  return out;
}

const NetInterval& network_at(const Trace& trace, Timestamp t) {
  if (trace.network.empty() || !(t >= 0.0) || t > trace.horizon) {
    throw TraceError(TraceErrorKind::OutOfRange,
                     "time " + fmt_time(t) + " outside [0, " + fmt_time(trace.horizon) + "]");
  }
  // First interval whose end is strictly after t.
  auto it = std::upper_bound(trace.network.begin(), trace.network.end(), t,
                             [](Timestamp v, const NetInterval& n) { return v < n.end; });
  if (it == trace.network.end()) return trace.network.back();
  return *it;
}

}  // namespace newsfetch
