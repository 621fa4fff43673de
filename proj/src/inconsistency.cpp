#include "csm/inconsistency.hpp"

#include "detail/json_reader.hpp"

#include <algorithm>
#include <initializer_list>
#include <map>
#include <sstream>

namespace csm {

namespace {

using EvRef = std::pair<std::size_t, double>;
using Rec = const AccessRecord *;

std::vector<EvRef> co(Rec r) { return {{r->checkoutEvent, r->checkoutTime}}; }

std::vector<EvRef> ci(Rec r)
{
  if (!r->checked_in())
    return {};
  return {{*r->checkinEvent, *r->checkinTime}};
}

std::vector<EvRef> span_of(Rec r)
{
  auto out = co(r);
  for (auto e : ci(r))
    out.push_back(e);
  return out;
}

bool overlap(double a0, double a1, double b0, double b1) { return a0 <= b1 && b0 <= a1; }

/// lo < coP < ciP < hi on a checked-in record P.
bool nested(double lo, Rec p, double hi) { return lo < p->checkoutTime && p->checkoutTime < *p->checkinTime && *p->checkinTime < hi; }

class WarningBuilder
{
public:
  WarningBuilder(PatternKind kind, std::vector<ActivityRef> activities, std::vector<std::string> artifacts,
                 double detection, std::optional<double> confirmedAt)
  {
    w_.kind = kind;
    w_.confirmed = confirmedAt.has_value();
    w_.activities = std::move(activities);
    w_.artifacts = std::move(artifacts);
    w_.detectionTime = detection;
    w_.confirmedAt = confirmedAt;
  }

  WarningBuilder &clause(std::string name, std::initializer_list<std::vector<EvRef>> parts = {})
  {
    const double limit = w_.confirmedAt.value_or(w_.detectionTime);
    std::set<std::size_t> ids;
    for (const auto &part : parts)
      for (const auto &[id, time] : part)
        if (time <= limit)
          ids.insert(id);
    w_.evidence.push_back(Evidence{std::move(name), {ids.begin(), ids.end()}});
    return *this;
  }

  InconsistencyWarning build() { return std::move(w_); }

private:
  InconsistencyWarning w_;
};

/// Records grouped for the pattern loops.
struct RecordIndex
{
  std::vector<Rec> writes;
  std::map<std::string, std::vector<Rec>> writesOf;  // by artifact
  std::map<std::string, std::vector<Rec>> readsOf;   // by artifact
  std::map<ActivityRef, std::vector<Rec>> writesBy;  // by activity
  std::map<ActivityRef, std::vector<Rec>> readsBy;   // by activity

  explicit RecordIndex(const AccessLedger &ledger)
  {
    for (Rec r : ledger.records()) {
      if (r->mode == AccessMode::Write) {
        writes.push_back(r);
        writesOf[r->artifact].push_back(r);
        writesBy[r->activity].push_back(r);
      } else {
        readsOf[r->artifact].push_back(r);
        readsBy[r->activity].push_back(r);
      }
    }
  }

  template <typename K> static const std::vector<Rec> &get(const std::map<K, std::vector<Rec>> &m, const K &k)
  {
    static const std::vector<Rec> none;
    auto it = m.find(k);
    return it == m.end() ? none : it->second;
  }
};

bool same_workflow(Rec a, Rec b) { return a->activity.workflow == b->activity.workflow; }

// Pattern matchers. Each yields confirmed warnings for every tuple whose
// clauses hold in the ledger; the possibility variants are in possibility_warnings.

void match_ww(const RecordIndex &ix, std::vector<InconsistencyWarning> &out)
{
  for (const auto &[d, recs] : ix.writesOf) {
    for (Rec a : recs) {
      for (Rec b : recs) {
        if (same_workflow(a, b) || !(a->checkoutTime < b->checkoutTime))
          continue;
        if (!a->checked_in() || !b->checked_in())
          continue;
        if (!overlap(a->checkoutTime, a->end(), b->checkoutTime, b->end()))
          continue;
        if (a->checkoutVersion != b->checkoutVersion || a->checkinVersion == b->checkinVersion)
          continue;
        out.push_back(WarningBuilder(PatternKind::WwDirectConflict, {a->activity, b->activity}, {d}, b->checkoutTime,
                                     std::max(*a->checkinTime, *b->checkinTime))
                        .clause("different-workflows")
                        .clause("writes", {co(a), co(b)})
                        .clause("overlap", {span_of(a), span_of(b)})
                        .clause("same-checkout-version", {co(a), co(b)})
                        .clause("different-checkin-versions", {ci(a), ci(b)})
                        .build());
      }
    }
  }
}

void match_p2(const RecordIndex &ix, const Reachability &deps, std::vector<InconsistencyWarning> &out)
{
  for (Rec a : ix.writes) {
    for (Rec b : ix.writes) {
      if (same_workflow(a, b) || a->artifact == b->artifact)
        continue;
      if (!overlap(a->checkoutTime, a->end(), b->checkoutTime, b->end()))
        continue;
      if (!deps.reaches(b->artifact, a->artifact))
        continue;
      const double t = std::max(a->checkoutTime, b->checkoutTime);
      out.push_back(WarningBuilder(PatternKind::PotentialIndirectConflict, {a->activity, b->activity},
                                   {a->artifact, b->artifact}, t, t)
                      .clause("different-workflows")
                      .clause("writes", {co(a), co(b)})
                      .clause("overlap", {span_of(a), span_of(b)})
                      .clause("depends")
                      .build());
    }
  }
}

/// A writes d; B reads d to write d1. `requireCheckin` false gives the
/// possibility form where A's check-in is still outstanding.
template <typename Emit> void match_rw_tuples(const RecordIndex &ix, bool requireCheckin, Emit emit)
{
  for (const auto &[d, reads] : ix.readsOf) {
    for (Rec br : reads) {
      for (Rec a : RecordIndex::get(ix.writesOf, d)) {
        if (same_workflow(a, br) || a->checked_in() != requireCheckin)
          continue;
        if (a->checkoutVersion != br->checkoutVersion)
          continue;
        if (requireCheckin && *a->checkinVersion == br->checkoutVersion)
          continue;
        for (Rec bw : RecordIndex::get(ix.writesBy, br->activity)) {
          const double startB = std::min(br->checkoutTime, bw->checkoutTime);
          if (!overlap(a->checkoutTime, a->end(), startB, bw->end()))
            continue;
          emit(a, br, bw);
        }
      }
    }
  }
}

void match_rw(const RecordIndex &ix, std::vector<InconsistencyWarning> &out)
{
  match_rw_tuples(ix, true, [&](Rec a, Rec br, Rec bw) {
    const double t = std::max({a->checkoutTime, br->checkoutTime, bw->checkoutTime});
    out.push_back(WarningBuilder(PatternKind::RwDirectConflict, {a->activity, br->activity}, {a->artifact, bw->artifact},
                                 t, std::max(t, *a->checkinTime))
                    .clause("different-workflows")
                    .clause("write", {co(a)})
                    .clause("read-for-write", {co(br), co(bw)})
                    .clause("overlap", {span_of(a), co(br), span_of(bw)})
                    .clause("same-checkout-version", {co(a), co(br)})
                    .clause("changed-input", {ci(a), co(br)})
                    .build());
  });
}

void match_www(const RecordIndex &ix, const Reachability &deps, std::vector<InconsistencyWarning> &out)
{
  for (Rec p : ix.writes) {
    if (!p->checked_in())
      continue;
    const auto &d2 = p->artifact;
    for (Rec a : ix.writes) {
      if (!a->checked_in() || same_workflow(a, p) || a->artifact == d2 || !(*a->checkinTime < p->checkoutTime))
        continue;
      if (!deps.reaches(a->artifact, d2))
        continue;
      for (Rec b : ix.writes) {
        if (b->activity == a->activity || !same_workflow(a, b) || b->artifact == d2)
          continue;
        if (!nested(*a->checkinTime, p, b->checkoutTime) || !deps.reaches(b->artifact, d2))
          continue;
        const double t = std::max(p->checkoutTime, b->checkoutTime);
        out.push_back(WarningBuilder(PatternKind::WwwPotentialIndirect, {a->activity, b->activity, p->activity},
                                     {a->artifact, b->artifact, d2}, t, t)
                        .clause("same-workflow")
                        .clause("foreign-writer")
                        .clause("writes", {co(a), co(b), co(p)})
                        .clause("nested", {ci(a), co(p), ci(p), co(b)})
                        .clause("depends")
                        .build());
      }
    }
  }
}

void match_rwr(const RecordIndex &ix, std::vector<InconsistencyWarning> &out)
{
  for (Rec p : ix.writes) {
    if (!p->checked_in())
      continue;
    const auto &d = p->artifact;
    const auto &reads = RecordIndex::get(ix.readsOf, d);
    for (Rec ar : reads) {
      if (same_workflow(ar, p) || ar->checkoutVersion != p->checkoutVersion)
        continue;
      for (Rec aw : RecordIndex::get(ix.writesBy, ar->activity)) {
        if (!aw->checked_in())
          continue;
        for (Rec br : reads) {
          if (br->activity == ar->activity || !same_workflow(ar, br) || *p->checkinVersion != br->checkoutVersion)
            continue;
          for (Rec bw : RecordIndex::get(ix.writesBy, br->activity)) {
            const double startB = std::min(br->checkoutTime, bw->checkoutTime);
            if (!nested(*aw->checkinTime, p, startB))
              continue;
            const double t = std::max(br->checkoutTime, bw->checkoutTime);
            out.push_back(WarningBuilder(PatternKind::RwrDirectInconsistency, {ar->activity, br->activity, p->activity},
                                         {d, aw->artifact, bw->artifact}, t, t)
                            .clause("same-workflow")
                            .clause("foreign-writer")
                            .clause("reads", {co(ar), co(br)})
                            .clause("writes", {co(aw), co(bw), co(p)})
                            .clause("nested", {ci(aw), co(p), ci(p), co(br), co(bw)})
                            .clause("version-chain", {co(ar), co(p), ci(p), co(br)})
                            .build());
          }
        }
      }
    }
  }
}

void match_w2w(const RecordIndex &ix, const Reachability &deps, std::vector<InconsistencyWarning> &out)
{
  for (const auto &[d2, recs] : ix.writesOf) {
    for (Rec p : recs) {
      if (!p->checked_in())
        continue;
      for (Rec a : recs) {
        if (!a->checked_in() || same_workflow(a, p) || !(*a->checkinTime < p->checkoutTime))
          continue;
        for (Rec b : ix.writes) {
          if (b->activity == a->activity || !same_workflow(a, b) || b->artifact == d2)
            continue;
          if (!nested(*a->checkinTime, p, b->checkoutTime) || !deps.reaches(b->artifact, d2))
            continue;
          out.push_back(WarningBuilder(PatternKind::W2wPotentialIndirect, {a->activity, b->activity, p->activity},
                                       {d2, b->artifact}, b->checkoutTime, b->checkoutTime)
                          .clause("same-workflow")
                          .clause("foreign-writer")
                          .clause("writes", {co(a), co(b), co(p)})
                          .clause("nested", {ci(a), co(p), ci(p), co(b)})
                          .clause("depends")
                          .build());
        }
      }
    }
  }
}

void match_wwr(const RecordIndex &ix, std::vector<InconsistencyWarning> &out)
{
  for (const auto &[d, recs] : ix.writesOf) {
    for (Rec p : recs) {
      if (!p->checked_in())
        continue;
      for (Rec a : recs) {
        if (!a->checked_in() || same_workflow(a, p) || *a->checkinVersion != p->checkoutVersion)
          continue;
        for (Rec br : RecordIndex::get(ix.readsOf, d)) {
          if (br->activity == a->activity || !same_workflow(a, br) || *p->checkinVersion != br->checkoutVersion)
            continue;
          for (Rec bw : RecordIndex::get(ix.writesBy, br->activity)) {
            const double startB = std::min(br->checkoutTime, bw->checkoutTime);
            if (!nested(*a->checkinTime, p, startB))
              continue;
            const double t = std::max(br->checkoutTime, bw->checkoutTime);
            out.push_back(WarningBuilder(PatternKind::WwrDirectInconsistency, {a->activity, br->activity, p->activity},
                                         {d, bw->artifact}, t, t)
                            .clause("same-workflow")
                            .clause("foreign-writer")
                            .clause("reads", {co(br)})
                            .clause("writes", {co(a), co(bw), co(p)})
                            .clause("nested", {ci(a), co(p), ci(p), co(br), co(bw)})
                            .clause("version-chain", {ci(a), co(p), ci(p), co(br)})
                            .build());
          }
        }
      }
    }
  }
}

std::vector<InconsistencyWarning> sorted(std::vector<InconsistencyWarning> v)
{
  sort_canonical(v);
  return v;
}

std::string format_time(double t)
{
  std::ostringstream os;
  os << t;
  return os.str();
}

std::string join(const std::vector<std::string> &items, std::string_view sep = ", ")
{
  std::string out;
  for (const auto &s : items)
    out += (out.empty() ? "" : std::string(sep)) + s;
  return out;
}

} // namespace

bool canonical_less(const InconsistencyWarning &a, const InconsistencyWarning &b)
{
  return std::tie(a.detectionTime, a.kind, a.activities, a.artifacts, b.confirmed) <
         std::tie(b.detectionTime, b.kind, b.activities, b.artifacts, a.confirmed);
}

void sort_canonical(std::vector<InconsistencyWarning> &warnings)
{
  std::stable_sort(warnings.begin(), warnings.end(), canonical_less);
}

std::vector<InconsistencyWarning> detect_ww_direct(const AccessLedger &ledger)
{
  std::vector<InconsistencyWarning> out;
  match_ww(RecordIndex(ledger), out);
  return sorted(std::move(out));
}

std::vector<InconsistencyWarning> detect_potential_indirect(const AccessLedger &ledger, const Reachability &deps)
{
  const RecordIndex ix(ledger);
  std::vector<InconsistencyWarning> out;
  match_p2(ix, deps, out);
  match_rw(ix, out);
  return sorted(std::move(out));
}

std::vector<InconsistencyWarning> detect_www(const AccessLedger &ledger, const Reachability &deps)
{
  const RecordIndex ix(ledger);
  std::vector<InconsistencyWarning> out;
  match_www(ix, deps, out);
  match_rwr(ix, out);
  return sorted(std::move(out));
}

std::vector<InconsistencyWarning> detect_w2w(const AccessLedger &ledger, const Reachability &deps)
{
  const RecordIndex ix(ledger);
  std::vector<InconsistencyWarning> out;
  match_w2w(ix, deps, out);
  match_wwr(ix, out);
  return sorted(std::move(out));
}

std::vector<InconsistencyWarning> detect_all(const AccessLedger &ledger, const Reachability &deps)
{
  const RecordIndex ix(ledger);
  std::vector<InconsistencyWarning> out;
  match_ww(ix, out);
  match_p2(ix, deps, out);
  match_rw(ix, out);
  match_www(ix, deps, out);
  match_rwr(ix, out);
  match_w2w(ix, deps, out);
  match_wwr(ix, out);
  return sorted(std::move(out));
}

std::vector<InconsistencyWarning> detect_all(const EventLog &log, const ProjectModel &model)
{
  return detect_all(AccessLedger(log), Reachability(model));
}

std::vector<InconsistencyWarning> possibility_warnings(const AccessLedger &ledger, const ChangeEvent &latest)
{
  std::vector<InconsistencyWarning> out;
  if (latest.action != Action::CheckOut)
    return out;
  const RecordIndex ix(ledger);
  const double now = latest.time;

  if (latest.mode == AccessMode::Write) {
    Rec b = ledger.find(latest.activity, latest.artifact);
    for (Rec a : RecordIndex::get(ix.writesOf, latest.artifact)) {
      if (a == b || same_workflow(a, b) || a->checked_in() || a->checkoutVersion != b->checkoutVersion)
        continue;
      out.push_back(WarningBuilder(PatternKind::WwDirectConflict, {a->activity, b->activity}, {latest.artifact}, now,
                                   std::nullopt)
                      .clause("different-workflows")
                      .clause("writes", {co(a), co(b)})
                      .clause("overlap", {co(a), co(b)})
                      .clause("same-checkout-version", {co(a), co(b)})
                      .build());
    }
  }

  match_rw_tuples(ix, false, [&](Rec a, Rec br, Rec bw) {
    const double t = std::max({a->checkoutTime, br->checkoutTime, bw->checkoutTime});
    if (t != now)
      return;
    out.push_back(WarningBuilder(PatternKind::RwDirectConflict, {a->activity, br->activity}, {a->artifact, bw->artifact},
                                 t, std::nullopt)
                    .clause("different-workflows")
                    .clause("write", {co(a)})
                    .clause("read-for-write", {co(br), co(bw)})
                    .clause("overlap", {co(a), co(br), co(bw)})
                    .clause("same-checkout-version", {co(a), co(br)})
                    .build());
  });
  return sorted(std::move(out));
}

// --- online monitor ------------------------------------------------------------

InconsistencyMonitor::InconsistencyMonitor(const ProjectModel &model) : deps_(model) {}

std::vector<InconsistencyWarning> InconsistencyMonitor::step(const ChangeEvent &event)
{
  if (lastTime_ && event.time <= *lastTime_)
    throw ProtocolError(ProtocolError::Code::TimeOrder,
                        "event at " + format_time(event.time) + " is not after " + format_time(*lastTime_));
  ledger_.add(event);
  lastTime_ = event.time;

  auto out = possibility_warnings(ledger_, event);
  // Clauses only become true, never false, as events arrive, so a tuple is new
  // exactly when its last clause was established by this event.
  for (auto &w : detect_all(ledger_, deps_)) {
    if (emitted_.insert(w.key()).second) {
      confirmed_.push_back(w);
      out.push_back(std::move(w));
    }
  }
  sort_canonical(out);
  return out;
}

std::vector<InconsistencyWarning> InconsistencyMonitor::confirmed() const { return sorted(confirmed_); }

Report monitor_log(const EventLog &log, const ProjectModel &model)
{
  InconsistencyMonitor monitor(model);
  Report report;
  for (const auto &e : log) {
    for (auto &w : monitor.step(e))
      report.timeline.push_back(TimelineEntry{e.time, std::move(w)});
  }
  report.warnings = monitor.confirmed();
  return report;
}

// --- advice and rendering --------------------------------------------------------

namespace {

std::vector<std::string> workflows_of(const std::vector<ActivityRef> &acts)
{
  std::set<std::string> ids;
  for (const auto &a : acts)
    ids.insert(a.workflow);
  return {ids.begin(), ids.end()};
}

std::vector<std::string> strategies(const std::vector<std::string> &artifacts, const std::vector<std::string> &workflows)
{
  const auto arts = join(artifacts);
  const auto wfs = join(workflows);
  return {
    "Fine-grain partition: split the work so each worker changes different parts of {" + arts + "}.",
    "Combined change request: replace workflows {" + wfs + "} with one workflow generated for a combined change request covering {" + arts + "}.",
    "Merge: move the activities of {" + wfs + "} that touch {" + arts + "} into one shared part of a single workflow.",
  };
}

} // namespace

std::vector<std::string> suggest_resolutions(const InconsistencyWarning &warning)
{
  std::vector<std::string> arts = warning.artifacts;
  std::sort(arts.begin(), arts.end());
  arts.erase(std::unique(arts.begin(), arts.end()), arts.end());
  return strategies(arts, workflows_of(warning.activities));
}

std::vector<std::string> suggest_resolutions(const BuildTimeWarning &warning)
{
  const std::vector<std::string> arts(warning.sharedArtifacts.begin(), warning.sharedArtifacts.end());
  auto out = strategies(arts, {warning.newWorkflow, warning.otherWorkflow});
  if (warning.kind == BuildTimeKind::PlanningVsExecuting)
    out.insert(out.begin(), "Delay: start workflow " + warning.newWorkflow + " only after executing workflow " +
                              warning.otherWorkflow + " has finished.");
  return out;
}

std::string describe(const InconsistencyWarning &w)
{
  std::vector<std::string> acts;
  for (const auto &a : w.activities)
    acts.push_back(to_string(a));
  std::string s = std::string(to_string(w.kind)) + (w.confirmed ? "" : " (possible)") + " activities [" + join(acts) +
                  "] artifacts [" + join(w.artifacts) + "] detected at " + format_time(w.detectionTime);
  if (w.confirmedAt)
    s += ", confirmed at " + format_time(*w.confirmedAt);
  return s;
}

namespace {

detail::json warning_json(const InconsistencyWarning &w)
{
  using detail::json;
  json acts = json::array();
  for (const auto &a : w.activities)
    acts.push_back({{"workflow", a.workflow}, {"activity", a.activity}});
  json ev = json::array();
  for (const auto &e : w.evidence)
    ev.push_back({{"clause", e.clause}, {"events", e.events}});
  return {{"kind", to_string(w.kind)},
          {"confirmed", w.confirmed},
          {"activities", std::move(acts)},
          {"artifacts", w.artifacts},
          {"detectionTime", w.detectionTime},
          {"confirmedAt", w.confirmedAt ? json(*w.confirmedAt) : json(nullptr)},
          {"evidence", std::move(ev)}};
}

InconsistencyWarning warning_from(const detail::json &node, const std::string &loc, std::vector<Diagnostic> &diags)
{
  detail::ObjectReader r(node, loc, diags);
  InconsistencyWarning w;
  w.kind = r.enumeration<PatternKind>("kind").value_or(PatternKind::WwDirectConflict);
  w.confirmed = r.boolean("confirmed").value_or(true);
  if (const auto *acts = r.array("activities")) {
    for (std::size_t i = 0; i < acts->size(); ++i) {
      detail::ObjectReader ar((*acts)[i], detail::index_locator(loc + ".activities", i), diags);
      w.activities.push_back(ActivityRef{ar.string("workflow").value_or(""), ar.string("activity").value_or("")});
      ar.finish();
    }
  }
  w.artifacts = r.strings("artifacts").value_or(std::vector<std::string>{});
  w.detectionTime = r.number("detectionTime").value_or(0.0);
  w.confirmedAt = r.number("confirmedAt", false);
  if (const auto *ev = r.array("evidence")) {
    for (std::size_t i = 0; i < ev->size(); ++i) {
      const auto eloc = detail::index_locator(loc + ".evidence", i);
      detail::ObjectReader er((*ev)[i], eloc, diags);
      Evidence e;
      e.clause = er.string("clause").value_or("");
      if (const auto *ids = er.array("events")) {
        for (const auto &id : *ids) {
          if (id.is_number_unsigned())
            e.events.push_back(id.get<std::size_t>());
          else
            er.fail(DiagnosticCategory::Schema, eloc + ".events", "expected event ids");
        }
      }
      er.finish();
      w.evidence.push_back(std::move(e));
    }
  }
  r.finish();
  if (w.confirmed != w.confirmedAt.has_value())
    r.fail(DiagnosticCategory::Invariant, loc + ".confirmedAt", "confirmed warnings carry confirmedAt, possible ones do not");
  return w;
}

} // namespace

std::string serialize_report(const Report &report)
{
  using detail::json;
  json j;
  j["schemaVersion"] = std::string(kSchemaVersion);
  j["warnings"] = json::array();
  for (const auto &w : report.warnings)
    j["warnings"].push_back(warning_json(w));
  j["timeline"] = json::array();
  for (const auto &t : report.timeline)
    j["timeline"].push_back({{"time", t.time}, {"warning", warning_json(t.warning)}});
  return detail::dump_canonical(j);
}

Report parse_report(std::string_view text)
{
  const auto root = detail::parse_json_text(text);
  std::vector<Diagnostic> diags;
  detail::ObjectReader top(root, "", diags);
  detail::check_schema_version(top);
  Report report;
  if (const auto *ws = top.array("warnings")) {
    for (std::size_t i = 0; i < ws->size(); ++i)
      report.warnings.push_back(warning_from((*ws)[i], detail::index_locator("warnings", i), diags));
  }
  if (const auto *tl = top.array("timeline")) {
    for (std::size_t i = 0; i < tl->size(); ++i) {
      const auto loc = detail::index_locator("timeline", i);
      detail::ObjectReader r((*tl)[i], loc, diags);
      TimelineEntry t;
      t.time = r.number("time").value_or(0.0);
      if (const auto *w = r.get("warning", true))
        t.warning = warning_from(*w, loc + ".warning", diags);
      r.finish();
      report.timeline.push_back(std::move(t));
    }
  }
  top.finish();
  if (!diags.empty())
    throw DocumentError(std::move(diags));
  return report;
}

std::string render_report_text(const Report &report)
{
  std::ostringstream os;
  os << "warnings: " << report.warnings.size() << "\n";
  for (const auto &w : report.warnings) {
    os << "  " << describe(w) << "\n";
    for (const auto &s : suggest_resolutions(w))
      os << "    - " << s << "\n";
  }
  os << "timeline:\n";
  for (const auto &t : report.timeline)
    os << "  t=" << format_time(t.time) << " " << describe(t.warning) << "\n";
  return os.str();
}

} // namespace csm
