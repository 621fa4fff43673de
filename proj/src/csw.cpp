#include "csm/csw.hpp"

#include "detail/json_reader.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

namespace csm {

const Activity *Csw::find_activity(std::string_view activity) const
{
  auto it = std::find_if(activities.begin(), activities.end(), [&](const Activity &a) { return a.id == activity; });
  return it == activities.end() ? nullptr : &*it;
}

Activity *Csw::find_activity(std::string_view activity)
{
  return const_cast<Activity *>(std::as_const(*this).find_activity(activity));
}

const Activity *Csw::writer_of(std::string_view artifact) const
{
  for (const auto &a : activities) {
    if (a.writeSet.count(std::string(artifact)))
      return &a;
  }
  return nullptr;
}

void Csw::refresh_derived_sets()
{
  artifacts.clear();
  workers.clear();
  for (const auto &a : activities) {
    artifacts.insert(a.writeSet.begin(), a.writeSet.end());
    artifacts.insert(a.readSet.begin(), a.readSet.end());
    if (a.worker)
      workers.insert(*a.worker);
  }
}

std::set<std::string> workers_of(const Csw &csw, std::string_view activity)
{
  const auto *a = csw.find_activity(activity);
  if (!a || !a->worker)
    return {};
  return {*a->worker};
}

bool is_acyclic(const Csw &csw)
{
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> next;
  for (const auto &a : csw.activities)
    indegree[a.id] = 0;
  for (const auto &[from, to] : csw.arcs) {
    next[from].push_back(to);
    ++indegree[to];
  }
  std::queue<std::string> ready;
  for (const auto &[id, deg] : indegree)
    if (deg == 0)
      ready.push(id);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto id = ready.front();
    ready.pop();
    ++visited;
    for (const auto &n : next[id])
      if (--indegree[n] == 0)
        ready.push(n);
  }
  return visited == indegree.size();
}

namespace {

std::set<std::string> diagram_ids(const ProjectModel &model)
{
  std::set<std::string> ids;
  for (const auto &d : model.diagrams)
    ids.insert(d.id);
  return ids;
}

class DisjointSets
{
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x)
  {
    while (parent_[x] != x)
      x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
  std::vector<std::size_t> parent_;
};

bool is_composite(const Activity &activity, const std::set<std::string> &cswArtifacts, const ProjectModel &model)
{
  return std::any_of(model.bdrs.begin(), model.bdrs.end(), [&](const Bdr &b) {
    return b.kind == BdrKind::ExistTogether && activity.writeSet.count(b.target) && !cswArtifacts.count(b.source);
  });
}

std::string activity_id(std::size_t index) { return "a" + std::to_string(index + 1); }

} // namespace

DependencyGraph workflow_graph(const ProjectModel &model, std::string_view root)
{
  const auto diagrams = diagram_ids(model);
  return dependency_graph(model, root, [&](const Bdr &b) {
    return !(b.kind == BdrKind::ExistTogether && diagrams.count(b.target));
  });
}

std::vector<std::set<std::string>> group_artifacts(const DependencyGraph &graph)
{
  const std::vector<std::string> vertices(graph.vertices.begin(), graph.vertices.end());
  auto index_of = [&](const std::string &v) {
    return static_cast<std::size_t>(std::lower_bound(vertices.begin(), vertices.end(), v) - vertices.begin());
  };
  DisjointSets sets(vertices.size());
  for (const auto &e : graph.edges) {
    if (e.kind == BdrKind::Copy || e.kind == BdrKind::InformationSharing)
      sets.unite(index_of(e.source), index_of(e.target));
  }
  std::map<std::size_t, std::set<std::string>> byRoot;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    byRoot[sets.find(i)].insert(vertices[i]);
  std::vector<std::set<std::string>> groups;
  for (auto &[_, g] : byRoot)
    groups.push_back(std::move(g));
  std::sort(groups.begin(), groups.end(), [](const auto &a, const auto &b) { return *a.begin() < *b.begin(); });
  return groups;
}

Csw generate_csw(const ProjectModel &model, std::string_view root, std::string cswId, std::string changeRequestId)
{
  const DependencyGraph graph = workflow_graph(model, root);
  auto groups = group_artifacts(graph);

  Csw csw;
  csw.id = std::move(cswId);
  csw.changeRequestId = std::move(changeRequestId);
  csw.rootArtifact = std::string(root);
  csw.grade = 1;
  csw.state = CswState::Planning;

  auto rootGroup = std::find_if(groups.begin(), groups.end(), [&](const auto &g) { return g.count(csw.rootArtifact); });
  std::set<std::string> rest = std::move(*rootGroup);
  groups.erase(rootGroup);
  rest.erase(csw.rootArtifact);

  csw.activities.push_back(Activity{activity_id(0), {csw.rootArtifact}, {}, std::nullopt, {}, false, {}});
  if (!rest.empty()) {
    csw.activities.push_back(Activity{activity_id(1), std::move(rest), {}, std::nullopt, {}, false, {}});
    csw.arcs.emplace(csw.activities[0].id, csw.activities[1].id);
  }
  for (auto &g : groups) {
    const auto id = activity_id(csw.activities.size());
    csw.activities.push_back(Activity{id, std::move(g), {}, std::nullopt, {}, false, {}});
  }

  for (const auto &e : graph.edges) {
    if (e.kind != BdrKind::Concept)
      continue;
    const auto *from = csw.writer_of(e.target);
    const auto *to = csw.writer_of(e.source);
    if (from && to && from != to)
      csw.arcs.emplace(from->id, to->id);
  }

  csw.refresh_derived_sets();
  for (auto &a : csw.activities)
    a.composite = is_composite(a, csw.artifacts, model);

  if (!is_acyclic(csw))
    throw CycleError("workflow '" + csw.id + "' has cyclic activity arcs");
  return csw;
}

std::vector<std::string> composite_roots(const Csw &csw, const Activity &activity, const ProjectModel &model)
{
  std::set<std::string> roots;
  for (const auto &b : model.bdrs) {
    if (b.kind == BdrKind::ExistTogether && activity.writeSet.count(b.target) && !csw.artifacts.count(b.source))
      roots.insert(b.source);
  }
  return {roots.begin(), roots.end()};
}

std::vector<Csw> expand_composite(Csw &parent, std::string_view activityId, const ProjectModel &model,
                                  std::span<const std::string> chosenRoots)
{
  auto it = std::find_if(parent.activities.begin(), parent.activities.end(),
                         [&](const Activity &a) { return a.id == activityId; });
  if (it == parent.activities.end())
    throw NotCompositeError("workflow '" + parent.id + "' has no activity '" + std::string(activityId) + "'");
  if (!it->composite)
    throw NotCompositeError("activity '" + it->id + "' of '" + parent.id + "' is not composite");

  const auto allowed = composite_roots(parent, *it, model);
  for (const auto &r : chosenRoots) {
    if (!std::binary_search(allowed.begin(), allowed.end(), r))
      throw InvalidRootError("'" + r + "' is not an ExistTogether source of activity '" + it->id + "'");
  }

  const auto position = static_cast<std::size_t>(it - parent.activities.begin()) + 1;
  std::vector<Csw> branches;
  for (const auto &r : chosenRoots) {
    const auto branchId =
      parent.id + "." + std::to_string(position) + "." + std::to_string(it->childWorkflows.size() + 1);
    branches.push_back(generate_csw(model, r, branchId, parent.changeRequestId));
    it->childWorkflows.push_back(branchId);
  }
  return branches;
}

std::vector<Csw> generate_subcsws(const ProjectModel &model, std::span<const Csw> existing, int grade)
{
  std::set<std::string> written;
  std::set<std::string> known;
  std::string changeRequest;
  for (const auto &c : existing) {
    known.insert(c.artifacts.begin(), c.artifacts.end());
    if (c.grade != grade)
      continue;
    if (changeRequest.empty())
      changeRequest = c.changeRequestId;
    for (const auto &a : c.activities)
      written.insert(a.writeSet.begin(), a.writeSet.end());
  }

  std::set<std::string> candidates;
  for (const auto &d : model.intraDeps) {
    if (written.count(d.target) && !known.count(d.source))
      candidates.insert(d.source);
    if (written.count(d.source) && !known.count(d.target))
      candidates.insert(d.target);
  }

  std::vector<Csw> out;
  for (const auto &root : candidates) {
    // An earlier sub-workflow of this batch may already cover the candidate.
    if (known.count(root))
      continue;
    const auto id = changeRequest + ".G" + std::to_string(grade + 1) + "." + std::to_string(out.size() + 1);
    Csw csw = generate_csw(model, root, id, changeRequest);
    csw.grade = grade + 1;
    known.insert(csw.artifacts.begin(), csw.artifacts.end());
    out.push_back(std::move(csw));
  }
  return out;
}

std::vector<Precedence> pipeline_constraints(const Csw &lower, const Csw &higher, const ProjectModel &model)
{
  if (higher.grade != lower.grade + 1)
    throw GradeMismatchError("pipeline constraints need adjoining grades, got " + std::to_string(lower.grade) + " and " +
                             std::to_string(higher.grade));
  std::vector<Precedence> out;
  auto link = [&](const std::string &low, const std::string &high) {
    const auto *la = lower.writer_of(low);
    const auto *hb = higher.writer_of(high);
    if (la && hb)
      out.push_back(Precedence{{lower.id, la->id}, {higher.id, hb->id}, low, high});
  };
  for (const auto &d : model.intraDeps) {
    link(d.target, d.source);
    if (d.target != d.source)
      link(d.source, d.target);
  }
  return out;
}

// --- documents -----------------------------------------------------------------

std::string serialize_csws(std::span<const Csw> workflows)
{
  using detail::json;
  json j;
  j["schemaVersion"] = std::string("1");
  j["workflows"] = json::array();
  for (const auto &c : workflows) {
    json acts = json::array();
    for (const auto &a : c.activities) {
      json item{{"id", a.id},
                {"writes", a.writeSet},
                {"reads", a.readSet},
                {"composite", a.composite},
                {"children", a.childWorkflows},
                {"start", a.interval.start ? json(*a.interval.start) : json(nullptr)},
                {"finish", a.interval.finish ? json(*a.interval.finish) : json(nullptr)}};
      if (a.worker)
        item["worker"] = *a.worker;
      acts.push_back(std::move(item));
    }
    json arcs = json::array();
    for (const auto &[from, to] : c.arcs)
      arcs.push_back({{"from", from}, {"to", to}});
    j["workflows"].push_back({{"id", c.id},
                              {"changeRequest", c.changeRequestId},
                              {"root", c.rootArtifact},
                              {"grade", c.grade},
                              {"state", to_string(c.state)},
                              {"activities", std::move(acts)},
                              {"arcs", std::move(arcs)},
                              {"artifacts", c.artifacts},
                              {"workers", c.workers}});
  }
  return detail::dump_canonical(j);
}

std::vector<Csw> parse_csws(std::string_view text)
{
  using detail::json;
  using detail::ObjectReader;
  const json root = detail::parse_json_text(text);
  std::vector<Diagnostic> diags;
  ObjectReader top(root, "", diags);
  detail::check_schema_version(top);
  std::vector<Csw> out;
  const json *workflows = top.array("workflows");
  for (std::size_t i = 0; workflows && i < workflows->size(); ++i) {
    const auto loc = detail::index_locator("workflows", i);
    ObjectReader r((*workflows)[i], loc, diags);
    Csw c;
    c.id = r.string("id").value_or("");
    c.changeRequestId = r.string("changeRequest").value_or("");
    c.rootArtifact = r.string("root").value_or("");
    c.grade = static_cast<int>(r.integer("grade").value_or(1));
    c.state = r.enumeration<CswState>("state").value_or(CswState::Planning);
    if (c.grade < 1)
      r.fail(DiagnosticCategory::Schema, loc + ".grade", "grade must be positive");
    const json *acts = r.array("activities");
    for (std::size_t k = 0; acts && k < acts->size(); ++k) {
      const auto aloc = detail::index_locator(loc + ".activities", k);
      ObjectReader ar((*acts)[k], aloc, diags);
      Activity a;
      a.id = ar.string("id").value_or("");
      auto writes = ar.strings("writes").value_or(std::vector<std::string>{});
      auto reads = ar.strings("reads").value_or(std::vector<std::string>{});
      a.writeSet = {writes.begin(), writes.end()};
      a.readSet = {reads.begin(), reads.end()};
      a.worker = ar.string("worker", false);
      a.composite = ar.boolean("composite").value_or(false);
      a.childWorkflows = ar.strings("children").value_or(std::vector<std::string>{});
      a.interval.start = ar.number("start", false);
      a.interval.finish = ar.number("finish", false);
      ar.finish();
      for (const auto &w : a.writeSet) {
        if (a.readSet.count(w))
          ar.fail(DiagnosticCategory::Invariant, aloc, "artifact '" + w + "' is both read and written");
      }
      if (!a.composite && !a.childWorkflows.empty())
        ar.fail(DiagnosticCategory::Invariant, aloc + ".children", "only composite activities have children");
      if (a.interval.start && a.interval.finish && *a.interval.start > *a.interval.finish)
        ar.fail(DiagnosticCategory::Invariant, aloc, "start is after finish");
      if (c.find_activity(a.id))
        ar.fail(DiagnosticCategory::Schema, aloc + ".id", "duplicate activity id '" + a.id + "'");
      c.activities.push_back(std::move(a));
    }
    const json *arcs = r.array("arcs");
    for (std::size_t k = 0; arcs && k < arcs->size(); ++k) {
      const auto aloc = detail::index_locator(loc + ".arcs", k);
      ObjectReader ar((*arcs)[k], aloc, diags);
      auto from = ar.string("from");
      auto to = ar.string("to");
      ar.finish();
      if (!from || !to)
        continue;
      if (!c.find_activity(*from) || !c.find_activity(*to))
        ar.fail(DiagnosticCategory::Reference, aloc, "arc endpoint is not an activity of '" + c.id + "'");
      else
        c.arcs.emplace(*from, *to);
    }
    auto artifacts = r.strings("artifacts").value_or(std::vector<std::string>{});
    auto workers = r.strings("workers").value_or(std::vector<std::string>{});
    r.finish();
    c.refresh_derived_sets();
    if (std::set<std::string>(artifacts.begin(), artifacts.end()) != c.artifacts)
      r.fail(DiagnosticCategory::Invariant, loc + ".artifacts", "artifacts differ from the union of read and write sets");
    if (std::set<std::string>(workers.begin(), workers.end()) != c.workers)
      r.fail(DiagnosticCategory::Invariant, loc + ".workers", "workers differ from the activity assignments");
    if (!is_acyclic(c))
      r.fail(DiagnosticCategory::Invariant, loc + ".arcs", "arcs contain a cycle");
    if (std::any_of(out.begin(), out.end(), [&](const Csw &o) { return o.id == c.id; }))
      r.fail(DiagnosticCategory::Schema, loc + ".id", "duplicate workflow id '" + c.id + "'");
    out.push_back(std::move(c));
  }
  top.finish();
  if (!diags.empty())
    throw DocumentError(std::move(diags));
  return out;
}

} // namespace csm
