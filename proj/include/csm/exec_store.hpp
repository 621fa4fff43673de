#pragma once

// Workflow lifecycle, the optimistic versioned artifact store and scenario replay.

#include "csm/change_event.hpp"
#include "csm/core_model.hpp"
#include "csm/csw.hpp"
#include "csm/model_ingest.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csm {

/// Planning -> Executing. Throws IllegalTransitionError from any other state.
void start_workflow(Csw &csw);
/// Executing -> Finished. Throws IllegalTransitionError from any other state.
void finish_workflow(Csw &csw);

struct Version
{
  std::string artifact;
  int number = 1;
  std::optional<ActivityRef> createdBy;  // nullopt = initial version
  double createdAt = 0.0;

  bool operator==(const Version &) const = default;
};

/// In-memory store. Never blocks concurrent check-ins; each check-in simply
/// creates the next version number.
class ArtifactStore
{
public:
  /// Takes ownership of a workflow. Throws std::invalid_argument on a duplicate id.
  void add_workflow(Csw csw);
  const Csw *find_workflow(std::string_view id) const;
  Csw &workflow(std::string_view id);
  const std::vector<Csw> &workflows() const noexcept { return workflows_; }

  /// Records a check-out of the latest version. The mode must match the
  /// activity's declared read or write set.
  ChangeEvent check_out(const ActivityRef &activity, const std::string &artifact, double time, AccessMode mode);
  /// Creates version latest+1 from an open write check-out.
  ChangeEvent check_in(const ActivityRef &activity, const std::string &artifact, double time);

  /// Every version of `artifact`, oldest first; untouched artifacts have only version 1.
  std::vector<Version> history(const std::string &artifact) const;
  int latest(const std::string &artifact) const;
  const EventLog &log() const noexcept { return log_; }

  /// Artifacts `activity` has checked out for writing and not yet checked in.
  std::set<std::string> open_writes(const ActivityRef &activity) const;

private:
  Activity &checked_activity(const ActivityRef &ref, double time);
  std::vector<Version> &versions(const std::string &artifact);
  void maybe_finish(Csw &csw);

  std::vector<Csw> workflows_;
  std::map<std::string, std::vector<Version>> histories_;
  std::map<std::pair<ActivityRef, std::string>, AccessMode> open_;
  std::set<std::pair<ActivityRef, std::string>> checkedOut_;
  std::set<std::pair<ActivityRef, std::string>> checkedIn_;
  EventLog log_;
};

enum class BuildTimeKind { PlanningVsPlanning, PlanningVsExecuting };

template <> struct enum_names<BuildTimeKind>
{
  static constexpr std::array<std::string_view, 2> values{"PlanningVsPlanning", "PlanningVsExecuting"};
};

struct BuildTimeWarning
{
  BuildTimeKind kind = BuildTimeKind::PlanningVsPlanning;
  std::string newWorkflow;
  std::string otherWorkflow;
  std::set<std::string> sharedArtifacts;

  bool operator==(const BuildTimeWarning &) const = default;
};

/// One warning per other non-finished workflow sharing an artifact with `newCsw`.
std::vector<BuildTimeWarning> buildtime_check(const Csw &newCsw, std::span<const Csw> others);

std::string describe(const BuildTimeWarning &w);

/// Workflows implied by a scenario's declarations alone (no arcs, grade 1).
std::vector<Csw> workflows_from_scenario(const ScenarioDocument &scenario);

/// Copies the scenario's read/write/worker declarations into matching
/// workflows. Throws ProtocolError (UnknownActivity, UndeclaredArtifact).
void apply_declarations(std::vector<Csw> &csws, const ScenarioDocument &scenario);

struct ReplayResult
{
  ArtifactStore store;
  EventLog log;
};

/// Applies the scenario's events in order. With no workflows given they are
/// built from the scenario declarations. Workflows start at their first event.
/// The first protocol violation aborts with locator "events[i]".
ReplayResult replay_scenario(const ProjectModel &model, std::vector<Csw> csws, const ScenarioDocument &scenario);

std::string serialize_event_log(const EventLog &log);
/// Throws DocumentError.
EventLog parse_event_log(std::string_view text);

} // namespace csm
