#pragma once

// Per-activity, per-artifact view of an event log: one record per check-out,
// completed by the matching check-in.

#include "csm/change_event.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace csm {

struct AccessRecord
{
  ActivityRef activity;
  std::string artifact;
  AccessMode mode = AccessMode::Write;
  std::size_t checkoutEvent = 0;
  double checkoutTime = 0.0;
  int checkoutVersion = 1;
  std::optional<std::size_t> checkinEvent;
  std::optional<double> checkinTime;
  std::optional<int> checkinVersion;

  bool checked_in() const noexcept { return checkinTime.has_value(); }
  /// Check-in time, or +infinity while the checkout is open.
  double end() const noexcept { return checkinTime.value_or(std::numeric_limits<double>::infinity()); }
};

class AccessLedger
{
public:
  AccessLedger() = default;
  explicit AccessLedger(const EventLog &log);

  /// Throws ProtocolError for a check-in with no open write record or a repeated check-out.
  void add(const ChangeEvent &event);

  const AccessRecord *find(const ActivityRef &activity, const std::string &artifact) const;
  /// Every record, ordered by (activity, artifact).
  std::vector<const AccessRecord *> records() const;
  std::vector<const AccessRecord *> records_of(const ActivityRef &activity) const;
  std::vector<ActivityRef> activities() const;

  /// Earliest checkout time of the activity.
  std::optional<double> start_of(const ActivityRef &activity) const;

private:
  std::map<ActivityRef, std::map<std::string, AccessRecord>> byActivity_;
};

} // namespace csm
