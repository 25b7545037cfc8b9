#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newsfetch/trace.hpp"

namespace newsfetch {

enum class RadioKind { WiFi, Cellular };
enum class RadioState { Idle, ActiveWiFi, ActiveCell, TailWiFi, TailCell };
inline constexpr std::size_t kRadioStateCount = 5;

std::string_view to_string(RadioState state);

struct EnergyParams {
  double p_idle = 0.05;
  double p_active_wifi = 0.7;
  double p_active_cell = 1.2;
  double p_tail_wifi = 0.3;
  double p_tail_cell = 0.6;
  Seconds t_tail_wifi = 3.0;
  Seconds t_tail_cell = 12.0;

  // 0 <= p_idle <= p_tail <= p_active per radio, tails >= 0.
  void validate() const;  // throws std::invalid_argument

  [[nodiscard]] double power(RadioState state) const noexcept;
  [[nodiscard]] Seconds tail(RadioKind kind) const noexcept {
    return kind == RadioKind::WiFi ? t_tail_wifi : t_tail_cell;
  }
};

struct RadioSegment {
  RadioState state = RadioState::Idle;
  Timestamp start = 0.0;
  Timestamp end = 0.0;

  [[nodiscard]] Seconds length() const noexcept { return end - start; }
  bool operator==(const RadioSegment&) const = default;
};

using RadioTimeline = std::vector<RadioSegment>;

enum class TransferPurpose { Demand, Prefetch };

struct Transfer {
  RadioKind kind = RadioKind::WiFi;
  Timestamp start = 0.0;
  Timestamp end = 0.0;
  std::uint64_t bytes = 0;
  TransferPurpose purpose = TransferPurpose::Demand;
};

enum class LedgerErrorKind { OutOfOrder, OverlappingActive, InvalidTransfer, IncompleteTimeline };

class LedgerError : public std::runtime_error {
 public:
  LedgerError(LedgerErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  [[nodiscard]] LedgerErrorKind kind() const noexcept { return kind_; }

 private:
  LedgerErrorKind kind_;
};

struct EnergyBreakdown {
  std::array<double, kRadioStateCount> seconds{};
  std::array<double, kRadioStateCount> joules{};
  double total_joules = 0.0;
};

// Radio state accounting over [0, horizon]. Transfers are appended in
// non-decreasing start order. A transfer that begins inside a pending tail
// truncates it; a fresh tail follows the new transfer. Overlapping or
// back-to-back transfers on the same radio merge into one active stretch.
// Everything past the horizon is clipped.
class EnergyLedger {
 public:
  EnergyLedger(Timestamp horizon, EnergyParams params);

  // Throws LedgerError on out-of-order starts or overlap with an active
  // stretch of the other radio. Zero-length transfers are ignored.
  void account_transfer(RadioKind kind, Timestamp start, Seconds duration,
                        std::uint64_t bytes = 0,
                        TransferPurpose purpose = TransferPurpose::Demand);

  [[nodiscard]] RadioTimeline timeline() const;
  [[nodiscard]] EnergyBreakdown breakdown() const;
  [[nodiscard]] double total_energy() const { return breakdown().total_joules; }

  [[nodiscard]] const std::vector<Transfer>& transfers() const noexcept { return transfers_; }
  [[nodiscard]] Timestamp horizon() const noexcept { return horizon_; }
  [[nodiscard]] const EnergyParams& params() const noexcept { return params_; }

 private:
  struct ActiveBlock {
    RadioKind kind;
    Timestamp start;
    Timestamp end;
  };

  Timestamp horizon_;
  EnergyParams params_;
  std::vector<ActiveBlock> blocks_;
  std::vector<Transfer> transfers_;
};

// Integrates a piecewise-constant power function. Throws
// LedgerError(IncompleteTimeline) unless the segments tile [0, horizon].
double total_energy(const RadioTimeline& timeline, Timestamp horizon, const EnergyParams& params);

}  // namespace newsfetch
