#include "newsfetch/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "newsfetch/config.hpp"
#include "newsfetch/sim.hpp"
#include "newsfetch/synth.hpp"
#include "newsfetch/trace.hpp"

namespace newsfetch::cli {

namespace {

// Thrown for unreadable inputs and unwritable outputs (exit code 2).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + p.string());
  return ss.str();
}

void write_file(const path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing " + p.string());
}

Config load(const std::optional<path>& config_path, const std::optional<std::uint64_t>& seed) {
  Config c;
  if (config_path) {
    const std::string text = read_file(*config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    c = config_from_json(j);
  }
  if (seed) {
    c.seed = *seed;
    c.scheduler.ranking_seed = *seed;
  }
  return c;
}

Trace load_trace(const path& p) { return parse_trace(std::string_view(read_file(p))); }

// Runs `body`, mapping failures onto exit codes with a message on `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    body();
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("bad budget value \"" + std::string(s) + "\"");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void summarize_state(const nlohmann::json& state, std::ostream& out) {
  const auto& kw = state.at("preference").at("keywords").at("entries");
  std::vector<std::pair<std::string, double>> top;
  for (const auto& [k, w] : kw.items()) top.emplace_back(k, w.get<double>());
  std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  out << "keywords tracked: " << top.size() << '\n';
  for (std::size_t i = 0; i < std::min<std::size_t>(10, top.size()); ++i) {
    out << "  " << top[i].first << ' ' << format_number(top[i].second) << '\n';
  }
  const auto& sites = state.at("preference").at("sites");
  out << "site visits: " << sites.at("total_visits").get<std::uint64_t>() << '\n';
  for (const auto& [site, node] : sites.at("sites").items()) {
    out << "  " << site << ' ' << node.at("visit_count").get<std::uint64_t>() << '\n';
  }
  const auto& sessions = state.at("sessions");
  out << "wifi sessions recorded: " << sessions.at("global").size() << '\n';
  out << "request gaps recorded: " << state.at("gaps").at("gaps").size() << '\n';
  const auto& fetch = state.at("fetch_time");
  out << "fetches recorded: " << fetch.at("count").get<std::uint64_t>()
      << ", mean " << format_number(fetch.at("mean_seconds").get<double>()) << " s\n";
}

}  // namespace

std::vector<std::uint64_t> parse_budgets(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    if (auto dots = item.find(".."); dots != std::string_view::npos) {
      const std::uint64_t lo = parse_u64(trim(item.substr(0, dots)));
      const std::uint64_t hi = parse_u64(trim(item.substr(dots + 2)));
      if (lo > hi) throw std::invalid_argument("budget range is descending");
      for (std::uint64_t b = lo; b <= hi; ++b) out.push_back(b);
    } else {
      out.push_back(parse_u64(item));
    }
  }
  if (out.empty()) throw std::invalid_argument("budget list is empty");
  return out;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const Config config = load(args.config, args.seed);
    const Trace trace = load_trace(args.trace);
    const SimOutcome outcome = simulate(trace, config);
    write_file(args.out, serialize_report(outcome.report));
    if (args.state_out) write_file(*args.state_out, state_to_json(outcome).dump(2) + "\n");
  });
}

int cmd_generate(const GenerateArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    SynthParams p;
    if (args.params) {
      const std::string text = read_file(*args.params);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("params are not valid JSON: ") + e.what());
      }
      p = synth_params_from_json(j);
    }
    if (args.seed) p.seed = *args.seed;
    if (args.days) p.days = *args.days;
    if (args.articles_per_day) p.articles_per_day = *args.articles_per_day;
    if (args.reads_per_day) p.reads_per_day = *args.reads_per_day;
    write_file(args.out, serialize_trace(generate(p)));
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<std::uint64_t> budgets = parse_budgets(args.budgets);
    const Config config = load(args.config, args.seed);
    const Trace trace = load_trace(args.trace);
    const std::vector<MetricsReport> reports = sweep(trace, config, budgets);
    write_file(args.out, sweep_csv(budgets, reports));
  });
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.state) {
      const std::string text = read_file(*args.state);
      nlohmann::json state;
      try {
        state = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("state dump is not valid JSON: ") + e.what());
      }
      summarize_state(state, out);
      return;
    }
    if (!args.trace) throw std::invalid_argument("report needs --state or --trace");
    const Config config = load(args.config, args.seed);
    const Trace trace = load_trace(*args.trace);
    SimOptions opts;
    opts.compute_baseline = false;
    const std::string dump = state_to_json(simulate(trace, config, opts)).dump(2) + "\n";
    if (args.out) {
      write_file(*args.out, dump);
    } else {
      out << dump;
    }
  });
}

}  // namespace newsfetch::cli
