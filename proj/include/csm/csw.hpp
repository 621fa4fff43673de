#pragma once

// Change support workflows: the workflow tuple, its generation from the
// dependency graph of a change root, composite expansion, graded sub-workflows
// and pipeline constraints between adjoining grades.

#include "csm/change_event.hpp"
#include "csm/core_model.hpp"
#include "csm/impact.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csm {

/// Start and finish of an activity; nullopt means undecided.
struct TimeInterval
{
  std::optional<double> start;
  std::optional<double> finish;

  bool operator==(const TimeInterval &) const = default;
};

struct Activity
{
  std::string id;
  std::set<std::string> writeSet;
  std::set<std::string> readSet;
  std::optional<std::string> worker;
  TimeInterval interval;
  bool composite = false;
  std::vector<std::string> childWorkflows;

  bool operator==(const Activity &) const = default;
};

enum class CswState { Planning, Executing, Finished };

template <> struct enum_names<CswState>
{
  static constexpr std::array<std::string_view, 3> values{"Planning", "Executing", "Finished"};
};

struct Csw
{
  std::string id;
  std::vector<Activity> activities;
  std::set<std::pair<std::string, std::string>> arcs;  // (from activity, to activity)
  std::set<std::string> artifacts;
  std::set<std::string> workers;
  int grade = 1;
  CswState state = CswState::Planning;
  std::string changeRequestId;
  std::string rootArtifact;

  const Activity *find_activity(std::string_view activity) const;
  Activity *find_activity(std::string_view activity);
  /// Activity whose write set holds `artifact`, if any.
  const Activity *writer_of(std::string_view artifact) const;
  /// Recomputes `artifacts` and `workers` from the activities.
  void refresh_derived_sets();

  bool operator==(const Csw &) const = default;
};

/// Workers assigned to an activity (empty when unassigned).
std::set<std::string> workers_of(const Csw &csw, std::string_view activity);

/// Arcs form a DAG over the activity ids.
bool is_acyclic(const Csw &csw);

/// Dependency graph used for workflow construction: every BDR is followed
/// except ExistTogether whose target is a diagram. Those diagram contents are
/// reached through composite activities instead.
DependencyGraph workflow_graph(const ProjectModel &model, std::string_view root);

/// Connected components under Copy and InformationSharing edges, ordered by
/// smallest member id.
std::vector<std::set<std::string>> group_artifacts(const DependencyGraph &graph);

Csw generate_csw(const ProjectModel &model, std::string_view root, std::string cswId, std::string changeRequestId);

/// Builds one branch workflow per chosen root of a composite activity and
/// records them as the activity's children.
std::vector<Csw> expand_composite(Csw &parent, std::string_view activityId, const ProjectModel &model,
                                  std::span<const std::string> chosenRoots);

/// Sources of ExistTogether BDRs that make `activity` composite.
std::vector<std::string> composite_roots(const Csw &csw, const Activity &activity, const ProjectModel &model);

/// Grade `grade + 1` workflows rooted at artifacts intra-dependent on artifacts
/// written by grade `grade` workflows and absent from every existing workflow.
std::vector<Csw> generate_subcsws(const ProjectModel &model, std::span<const Csw> existing, int grade);

struct Precedence
{
  ActivityRef before;
  ActivityRef after;
  std::string lowerArtifact;
  std::string higherArtifact;

  bool operator==(const Precedence &) const = default;
};

std::vector<Precedence> pipeline_constraints(const Csw &lower, const Csw &higher, const ProjectModel &model);

std::string serialize_csws(std::span<const Csw> workflows);
/// Throws DocumentError.
std::vector<Csw> parse_csws(std::string_view text);

} // namespace csm
