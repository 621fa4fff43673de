#pragma once

// Inconsistency patterns over check-out/check-in logs, offline and online.
//
// Role conventions (activities and artifacts are reported in this order):
//   WwDirectConflict           A, B          d            A checked out first
//   PotentialIndirectConflict  A, B          d2, d6       A writes d2, B writes d6, d6 depends on d2
//   RwDirectConflict           A, B          d, d1        A writes d, B reads d to write d1
//   WwwPotentialIndirect       A, B, P       d6, d7, d2   A, B same workflow; P foreign, writes d2
//   RwrDirectInconsistency     A, B, P       d, d1, d2    A reads d for d1, B reads d for d2, P writes d
//   W2wPotentialIndirect       A, B, P       d2, d7       A, P write d2; B writes d7
//   WwrDirectInconsistency     A, B, P       d, d1        A, P write d; B reads d to write d1

#include "csm/access_ledger.hpp"
#include "csm/change_event.hpp"
#include "csm/core_model.hpp"
#include "csm/exec_store.hpp"
#include "csm/impact.hpp"

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace csm {

enum class PatternKind {
  WwDirectConflict,
  PotentialIndirectConflict,
  RwDirectConflict,
  WwwPotentialIndirect,
  RwrDirectInconsistency,
  W2wPotentialIndirect,
  WwrDirectInconsistency,
};

template <> struct enum_names<PatternKind>
{
  static constexpr std::array<std::string_view, 7> values{
    "WwDirectConflict",     "PotentialIndirectConflict", "RwDirectConflict",      "WwwPotentialIndirect",
    "RwrDirectInconsistency", "W2wPotentialIndirect",    "WwrDirectInconsistency",
  };
};

struct Evidence
{
  std::string clause;
  std::vector<std::size_t> events;  // log positions

  bool operator==(const Evidence &) const = default;
};

struct InconsistencyWarning
{
  PatternKind kind = PatternKind::WwDirectConflict;
  bool confirmed = true;
  std::vector<ActivityRef> activities;
  std::vector<std::string> artifacts;
  double detectionTime = 0.0;
  /// Time at which every clause is established; nullopt for possibility warnings.
  std::optional<double> confirmedAt;
  std::vector<Evidence> evidence;

  bool operator==(const InconsistencyWarning &) const = default;
  /// Identity of the matched tuple, ignoring confirmation and evidence.
  std::tuple<PatternKind, std::vector<ActivityRef>, std::vector<std::string>> key() const
  {
    return {kind, activities, artifacts};
  }
};

/// Canonical order: detectionTime, kind, activities, artifacts, then confirmed first.
bool canonical_less(const InconsistencyWarning &a, const InconsistencyWarning &b);
void sort_canonical(std::vector<InconsistencyWarning> &warnings);

std::vector<InconsistencyWarning> detect_ww_direct(const AccessLedger &ledger);
/// PotentialIndirectConflict and RwDirectConflict.
std::vector<InconsistencyWarning> detect_potential_indirect(const AccessLedger &ledger, const Reachability &deps);
/// WwwPotentialIndirect and RwrDirectInconsistency.
std::vector<InconsistencyWarning> detect_www(const AccessLedger &ledger, const Reachability &deps);
/// W2wPotentialIndirect and WwrDirectInconsistency.
std::vector<InconsistencyWarning> detect_w2w(const AccessLedger &ledger, const Reachability &deps);

/// Every pattern, canonically sorted.
std::vector<InconsistencyWarning> detect_all(const AccessLedger &ledger, const Reachability &deps);
std::vector<InconsistencyWarning> detect_all(const EventLog &log, const ProjectModel &model);

/// Possibility warnings raised by the latest event alone: a same-version write
/// checkout while another workflow's write is open (WW), or a read whose writer
/// is still open (RW).
std::vector<InconsistencyWarning> possibility_warnings(const AccessLedger &ledger, const ChangeEvent &latest);

/// Incremental detection. Each confirmed warning is emitted at the event that
/// establishes its last clause.
class InconsistencyMonitor
{
public:
  explicit InconsistencyMonitor(const ProjectModel &model);

  /// Throws ProtocolError(TimeOrder) unless times strictly increase.
  std::vector<InconsistencyWarning> step(const ChangeEvent &event);

  /// Confirmed warnings emitted so far, canonically sorted.
  std::vector<InconsistencyWarning> confirmed() const;
  const AccessLedger &ledger() const noexcept { return ledger_; }

private:
  Reachability deps_;
  AccessLedger ledger_;
  std::optional<double> lastTime_;
  std::set<std::tuple<PatternKind, std::vector<ActivityRef>, std::vector<std::string>>> emitted_;
  std::vector<InconsistencyWarning> confirmed_;
};

std::vector<std::string> suggest_resolutions(const InconsistencyWarning &warning);
std::vector<std::string> suggest_resolutions(const BuildTimeWarning &warning);

std::string describe(const InconsistencyWarning &w);

/// One monitor emission: the event time and the warning raised.
struct TimelineEntry
{
  double time = 0.0;
  InconsistencyWarning warning;

  bool operator==(const TimelineEntry &) const = default;
};

struct Report
{
  std::vector<InconsistencyWarning> warnings;
  std::vector<TimelineEntry> timeline;

  bool operator==(const Report &) const = default;
};

/// Runs the monitor over a whole log.
Report monitor_log(const EventLog &log, const ProjectModel &model);

std::string serialize_report(const Report &report);
/// Throws DocumentError.
Report parse_report(std::string_view text);
std::string render_report_text(const Report &report);

} // namespace csm
