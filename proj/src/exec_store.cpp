#include "csm/exec_store.hpp"

#include "detail/json_reader.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace csm {

void start_workflow(Csw &csw)
{
  if (csw.state != CswState::Planning)
    throw IllegalTransitionError("workflow '" + csw.id + "' cannot start from " + std::string(to_string(csw.state)));
  csw.state = CswState::Executing;
}

void finish_workflow(Csw &csw)
{
  if (csw.state != CswState::Executing)
    throw IllegalTransitionError("workflow '" + csw.id + "' cannot finish from " + std::string(to_string(csw.state)));
  csw.state = CswState::Finished;
}

// --- store ---------------------------------------------------------------------

void ArtifactStore::add_workflow(Csw csw)
{
  if (find_workflow(csw.id))
    throw std::invalid_argument("duplicate workflow '" + csw.id + "'");
  workflows_.push_back(std::move(csw));
}

const Csw *ArtifactStore::find_workflow(std::string_view id) const
{
  auto it = std::find_if(workflows_.begin(), workflows_.end(), [&](const Csw &c) { return c.id == id; });
  return it == workflows_.end() ? nullptr : &*it;
}

Csw &ArtifactStore::workflow(std::string_view id)
{
  auto it = std::find_if(workflows_.begin(), workflows_.end(), [&](const Csw &c) { return c.id == id; });
  if (it == workflows_.end())
    throw ProtocolError(ProtocolError::Code::UnknownActivity, "unknown workflow '" + std::string(id) + "'");
  return *it;
}

std::vector<Version> &ArtifactStore::versions(const std::string &artifact)
{
  auto &h = histories_[artifact];
  if (h.empty())
    h.push_back(Version{artifact, 1, std::nullopt, 0.0});
  return h;
}

std::vector<Version> ArtifactStore::history(const std::string &artifact) const
{
  if (auto it = histories_.find(artifact); it != histories_.end())
    return it->second;
  return {Version{artifact, 1, std::nullopt, 0.0}};
}

int ArtifactStore::latest(const std::string &artifact) const { return history(artifact).back().number; }

std::set<std::string> ArtifactStore::open_writes(const ActivityRef &activity) const
{
  std::set<std::string> out;
  for (const auto &[key, mode] : open_) {
    if (key.first == activity && mode == AccessMode::Write)
      out.insert(key.second);
  }
  return out;
}

Activity &ArtifactStore::checked_activity(const ActivityRef &ref, double time)
{
  Csw &csw = workflow(ref.workflow);
  Activity *a = csw.find_activity(ref.activity);
  if (!a)
    throw ProtocolError(ProtocolError::Code::UnknownActivity, "unknown activity '" + to_string(ref) + "'");
  if (csw.state != CswState::Executing)
    throw ProtocolError(ProtocolError::Code::WorkflowNotExecuting,
                        "workflow '" + csw.id + "' is " + std::string(to_string(csw.state)));
  if (!log_.empty() && time <= log_.back().time)
    throw ProtocolError(ProtocolError::Code::TimeOrder, "time " + std::to_string(time) + " is not after the last event");
  return *a;
}

ChangeEvent ArtifactStore::check_out(const ActivityRef &activity, const std::string &artifact, double time,
                                     AccessMode mode)
{
  Activity &a = checked_activity(activity, time);
  const auto &declared = mode == AccessMode::Write ? a.writeSet : a.readSet;
  if (!declared.count(artifact))
    throw ProtocolError(ProtocolError::Code::UndeclaredArtifact, "'" + artifact + "' is not in the " +
                                                                   (mode == AccessMode::Write ? "write" : "read") +
                                                                   " set of " + to_string(activity));
  const auto key = std::make_pair(activity, artifact);
  if (!checkedOut_.insert(key).second)
    throw ProtocolError(ProtocolError::Code::RepeatedCheckout, to_string(activity) + " already checked out '" + artifact + "'");

  open_[key] = mode;
  a.interval.start = std::min(a.interval.start.value_or(time), time);
  ChangeEvent ev{log_.size(), time, activity, artifact, Action::CheckOut, versions(artifact).back().number, mode};
  log_.push_back(ev);
  return ev;
}

ChangeEvent ArtifactStore::check_in(const ActivityRef &activity, const std::string &artifact, double time)
{
  Activity &a = checked_activity(activity, time);
  const auto key = std::make_pair(activity, artifact);
  auto it = open_.find(key);
  if (it == open_.end() || it->second != AccessMode::Write)
    throw ProtocolError(ProtocolError::Code::NoOpenCheckout, to_string(activity) + " has no open write checkout of '" + artifact + "'");
  open_.erase(it);
  checkedIn_.insert(key);

  auto &h = versions(artifact);
  h.push_back(Version{artifact, h.back().number + 1, activity, time});
  if (open_writes(activity).empty())
    a.interval.finish = time;

  ChangeEvent ev{log_.size(), time, activity, artifact, Action::CheckIn, h.back().number, AccessMode::Write};
  log_.push_back(ev);
  maybe_finish(workflow(activity.workflow));
  return ev;
}

void ArtifactStore::maybe_finish(Csw &csw)
{
  for (const auto &a : csw.activities) {
    for (const auto &d : a.writeSet) {
      if (!checkedIn_.count({ActivityRef{csw.id, a.id}, d}))
        return;
    }
  }
  finish_workflow(csw);
}

// --- build-time check ----------------------------------------------------------

std::vector<BuildTimeWarning> buildtime_check(const Csw &newCsw, std::span<const Csw> others)
{
  std::vector<BuildTimeWarning> out;
  for (const auto &o : others) {
    if (o.id == newCsw.id || o.state == CswState::Finished)
      continue;
    std::set<std::string> shared;
    std::set_intersection(newCsw.artifacts.begin(), newCsw.artifacts.end(), o.artifacts.begin(), o.artifacts.end(),
                          std::inserter(shared, shared.end()));
    if (shared.empty())
      continue;
    const auto kind = o.state == CswState::Executing ? BuildTimeKind::PlanningVsExecuting : BuildTimeKind::PlanningVsPlanning;
    out.push_back(BuildTimeWarning{kind, newCsw.id, o.id, std::move(shared)});
  }
  return out;
}

std::string describe(const BuildTimeWarning &w)
{
  std::string list;
  for (const auto &a : w.sharedArtifacts)
    list += (list.empty() ? "" : ", ") + a;
  return std::string(to_string(w.kind)) + ": workflow " + w.newWorkflow + " shares {" + list + "} with " +
         w.otherWorkflow;
}

// --- replay --------------------------------------------------------------------

std::vector<Csw> workflows_from_scenario(const ScenarioDocument &scenario)
{
  std::vector<Csw> out;
  for (const auto &w : scenario.workflows) {
    Csw c;
    c.id = w.id;
    for (const auto &a : w.activities) {
      Activity act;
      act.id = a.id;
      act.writeSet = {a.writes.begin(), a.writes.end()};
      act.readSet = {a.reads.begin(), a.reads.end()};
      act.worker = a.worker;
      c.activities.push_back(std::move(act));
    }
    c.refresh_derived_sets();
    out.push_back(std::move(c));
  }
  return out;
}

void apply_declarations(std::vector<Csw> &csws, const ScenarioDocument &scenario)
{
  for (std::size_t i = 0; i < scenario.workflows.size(); ++i) {
    const auto &decl = scenario.workflows[i];
    const auto loc = detail::index_locator("workflows", i);
    auto csw = std::find_if(csws.begin(), csws.end(), [&](const Csw &c) { return c.id == decl.id; });
    if (csw == csws.end())
      throw ProtocolError(ProtocolError::Code::UnknownActivity, "scenario workflow '" + decl.id + "' has no CSW", loc);
    for (std::size_t k = 0; k < decl.activities.size(); ++k) {
      const auto &ad = decl.activities[k];
      const auto aloc = detail::index_locator(loc + ".activities", k);
      Activity *a = csw->find_activity(ad.id);
      if (!a)
        throw ProtocolError(ProtocolError::Code::UnknownActivity,
                            "workflow '" + decl.id + "' has no activity '" + ad.id + "'", aloc);
      a->writeSet.insert(ad.writes.begin(), ad.writes.end());
      a->readSet.insert(ad.reads.begin(), ad.reads.end());
      for (const auto &r : a->readSet) {
        if (a->writeSet.count(r))
          throw ProtocolError(ProtocolError::Code::UndeclaredArtifact,
                              "'" + r + "' would be both read and written by " + decl.id + "/" + ad.id, aloc);
      }
      if (ad.worker)
        a->worker = ad.worker;
    }
    csw->refresh_derived_sets();
  }
}

ReplayResult replay_scenario(const ProjectModel &model, std::vector<Csw> csws, const ScenarioDocument &scenario)
{
  if (csws.empty())
    csws = workflows_from_scenario(scenario);
  else
    apply_declarations(csws, scenario);

  std::set<std::string> known;
  for (const auto &d : model.diagrams)
    known.insert(d.id);
  for (const auto &e : model.elements)
    known.insert(e.id);
  for (const auto &c : csws) {
    for (const auto &d : c.artifacts) {
      if (!known.count(d))
        throw ProtocolError(ProtocolError::Code::UndeclaredArtifact,
                            "workflow '" + c.id + "' uses '" + d + "', which is not in the model", "workflows");
    }
  }

  ReplayResult result;
  for (auto &c : csws)
    result.store.add_workflow(std::move(c));

  for (std::size_t i = 0; i < scenario.events.size(); ++i) {
    const auto &e = scenario.events[i];
    const ActivityRef ref{e.workflow, e.activity};
    try {
      Csw &csw = result.store.workflow(e.workflow);
      if (csw.state == CswState::Planning)
        start_workflow(csw);
      if (e.action == Action::CheckOut) {
        const Activity *a = csw.find_activity(e.activity);
        const bool writes = a && a->writeSet.count(e.artifact);
        result.store.check_out(ref, e.artifact, e.time, writes ? AccessMode::Write : AccessMode::Read);
      } else {
        result.store.check_in(ref, e.artifact, e.time);
      }
    } catch (const ProtocolError &err) {
      throw ProtocolError(err.code(), err.what(), detail::index_locator("events", i));
    }
  }
  result.log = result.store.log();
  return result;
}

// --- event log document ----------------------------------------------------------

std::string serialize_event_log(const EventLog &log)
{
  detail::json j;
  j["schemaVersion"] = std::string(kSchemaVersion);
  j["events"] = detail::json::array();
  for (const auto &e : log) {
    j["events"].push_back({{"id", e.id},
                           {"time", e.time},
                           {"workflow", e.activity.workflow},
                           {"activity", e.activity.activity},
                           {"artifact", e.artifact},
                           {"action", to_string(e.action)},
                           {"version", e.version},
                           {"mode", to_string(e.mode)}});
  }
  return detail::dump_canonical(j);
}

EventLog parse_event_log(std::string_view text)
{
  const auto root = detail::parse_json_text(text);
  std::vector<Diagnostic> diags;
  detail::ObjectReader top(root, "", diags);
  detail::check_schema_version(top);
  EventLog log;
  const auto *events = top.array("events");
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; events && i < events->size(); ++i) {
    const auto loc = detail::index_locator("events", i);
    detail::ObjectReader r((*events)[i], loc, diags);
    ChangeEvent e;
    const auto id = r.integer("id");
    e.time = r.number("time").value_or(0.0);
    e.activity.workflow = r.string("workflow").value_or("");
    e.activity.activity = r.string("activity").value_or("");
    e.artifact = r.string("artifact").value_or("");
    e.action = r.enumeration<Action>("action").value_or(Action::CheckOut);
    e.version = static_cast<int>(r.integer("version").value_or(1));
    e.mode = r.enumeration<AccessMode>("mode").value_or(AccessMode::Write);
    r.finish();
    e.id = i;
    if (id && *id != static_cast<long long>(i))
      r.fail(DiagnosticCategory::Invariant, loc + ".id", "event ids must equal their position");
    if (e.time <= last)
      r.fail(DiagnosticCategory::NonMonotonicTime, loc + ".time", "event times must strictly increase");
    if (e.version < 1)
      r.fail(DiagnosticCategory::Invariant, loc + ".version", "versions start at 1");
    if (e.action == Action::CheckIn && e.mode != AccessMode::Write)
      r.fail(DiagnosticCategory::Invariant, loc + ".mode", "check-ins are writes");
    last = e.time;
    log.push_back(std::move(e));
  }
  top.finish();
  if (!diags.empty())
    throw DocumentError(std::move(diags));
  return log;
}

} // namespace csm
