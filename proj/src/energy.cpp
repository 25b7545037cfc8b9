#include "newsfetch/energy.hpp"

#include <algorithm>
#include <cmath>

namespace newsfetch {

namespace {

RadioState active_state(RadioKind k) {
  return k == RadioKind::WiFi ? RadioState::ActiveWiFi : RadioState::ActiveCell;
}

RadioState tail_state(RadioKind k) {
  return k == RadioKind::WiFi ? RadioState::TailWiFi : RadioState::TailCell;
}

std::string fmt(double v) { return std::to_string(v); }

}  // namespace

std::string_view to_string(RadioState state) {
  switch (state) {
    case RadioState::Idle:
      return "idle";
    case RadioState::ActiveWiFi:
      return "active_wifi";
    case RadioState::ActiveCell:
      return "active_cell";
    case RadioState::TailWiFi:
      return "tail_wifi";
    case RadioState::TailCell:
      return "tail_cell";
  }
  return "idle";
}

void EnergyParams::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(p_idle) || !finite_nonneg(p_active_wifi) || !finite_nonneg(p_active_cell) ||
      !finite_nonneg(p_tail_wifi) || !finite_nonneg(p_tail_cell)) {
    throw std::invalid_argument("powers must be finite and non-negative");
  }
  if (!(p_idle <= p_tail_wifi && p_tail_wifi <= p_active_wifi)) {
    throw std::invalid_argument("WiFi powers must satisfy p_idle <= p_tail <= p_active");
  }
  if (!(p_idle <= p_tail_cell && p_tail_cell <= p_active_cell)) {
    throw std::invalid_argument("cellular powers must satisfy p_idle <= p_tail <= p_active");
  }
  if (!finite_nonneg(t_tail_wifi) || !finite_nonneg(t_tail_cell)) {
    throw std::invalid_argument("tail durations must be non-negative");
  }
}

double EnergyParams::power(RadioState state) const noexcept {
  switch (state) {
    case RadioState::Idle:
      return p_idle;
    case RadioState::ActiveWiFi:
      return p_active_wifi;
    case RadioState::ActiveCell:
      return p_active_cell;
    case RadioState::TailWiFi:
      return p_tail_wifi;
    case RadioState::TailCell:
      return p_tail_cell;
  }
  return p_idle;
}

EnergyLedger::EnergyLedger(Timestamp horizon, EnergyParams params)
    : horizon_(horizon), params_(params) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("ledger horizon must be finite and non-negative");
  }
  params_.validate();
}

void EnergyLedger::account_transfer(RadioKind kind, Timestamp start, Seconds duration,
                                    std::uint64_t bytes, TransferPurpose purpose) {
  if (!std::isfinite(start) || start < 0.0 || !std::isfinite(duration) || duration < 0.0) {
    throw LedgerError(LedgerErrorKind::InvalidTransfer,
                      "transfer needs finite start >= 0 and duration >= 0");
  }
  if (!transfers_.empty() && start < transfers_.back().start) {
    throw LedgerError(LedgerErrorKind::OutOfOrder, "transfer at " + fmt(start) +
                                                       " precedes the previous start " +
                                                       fmt(transfers_.back().start));
  }
  if (duration == 0.0) return;
  const Timestamp end = start + duration;

  if (!blocks_.empty() && start <= blocks_.back().end) {
    ActiveBlock& last = blocks_.back();
    if (last.kind != kind) {
      if (start < last.end) {
        throw LedgerError(LedgerErrorKind::OverlappingActive,
                          "transfer at " + fmt(start) + " overlaps an active stretch on the other radio");
      }
      blocks_.push_back({kind, start, end});
    } else {
      last.end = std::max(last.end, end);
    }
  } else {
    blocks_.push_back({kind, start, end});
  }
  transfers_.push_back({kind, start, end, bytes, purpose});
}

RadioTimeline EnergyLedger::timeline() const {
  RadioTimeline out;
  auto push = [&](RadioState s, Timestamp a, Timestamp b) {
    a = std::min(a, horizon_);
    b = std::min(b, horizon_);
    if (!(b > a)) return;
    if (!out.empty() && out.back().state == s && out.back().end == a) {
      out.back().end = b;
    } else {
      out.push_back({s, a, b});
    }
  };

  Timestamp cursor = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const ActiveBlock& b = blocks_[i];
    push(RadioState::Idle, cursor, b.start);
    push(active_state(b.kind), b.start, b.end);
    Timestamp tail_end = b.end + params_.tail(b.kind);
    if (i + 1 < blocks_.size()) tail_end = std::min(tail_end, blocks_[i + 1].start);
    push(tail_state(b.kind), b.end, tail_end);
    cursor = std::max(b.end, tail_end);
  }
  push(RadioState::Idle, cursor, horizon_);
  return out;
}

EnergyBreakdown EnergyLedger::breakdown() const {
  EnergyBreakdown e;
  for (const auto& seg : timeline()) {
    auto idx = static_cast<std::size_t>(seg.state);
    e.seconds[idx] += seg.length();
    e.joules[idx] += params_.power(seg.state) * seg.length();
  }
  for (double j : e.joules) e.total_joules += j;
  return e;
}

double total_energy(const RadioTimeline& timeline, Timestamp horizon, const EnergyParams& params) {
  Timestamp cursor = 0.0;
  double joules = 0.0;
  for (const auto& seg : timeline) {
    if (seg.start != cursor || seg.end < seg.start) {
      throw LedgerError(LedgerErrorKind::IncompleteTimeline,
                        "timeline is not contiguous at " + fmt(cursor));
    }
    joules += params.power(seg.state) * seg.length();
    cursor = seg.end;
  }
  if (cursor != horizon) {
    throw LedgerError(LedgerErrorKind::IncompleteTimeline,
                      "timeline ends at " + fmt(cursor) + ", horizon is " + fmt(horizon));
  }
  return joules;
}

}  // namespace newsfetch
