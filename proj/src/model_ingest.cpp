#include "csm/model_ingest.hpp"

#include "detail/json_reader.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace csm {

using detail::index_locator;
using detail::json;
using detail::ObjectReader;

std::string to_string(const ActivityRef &a) { return a.workflow + "/" + a.activity; }

const ActivityDeclaration *WorkflowDeclaration::find(std::string_view activity) const
{
  auto it = std::find_if(activities.begin(), activities.end(), [&](const auto &a) { return a.id == activity; });
  return it == activities.end() ? nullptr : &*it;
}

const WorkflowDeclaration *ScenarioDocument::find(std::string_view workflow) const
{
  auto it = std::find_if(workflows.begin(), workflows.end(), [&](const auto &w) { return w.id == workflow; });
  return it == workflows.end() ? nullptr : &*it;
}

// --- model -----------------------------------------------------------------

namespace {

template <typename T, typename Fn>
std::vector<T> read_list(ObjectReader &r, std::string_view key, bool required, Fn &&readItem)
{
  std::vector<T> out;
  const json *arr = r.array(key, required);
  if (!arr)
    return out;
  const std::string base = r.field_locator(key);
  for (std::size_t i = 0; i < arr->size(); ++i) {
    if (auto item = readItem((*arr)[i], index_locator(base, i)))
      out.push_back(std::move(*item));
  }
  return out;
}

ProjectModel read_model(const json &root, std::vector<Diagnostic> &diags)
{
  ObjectReader top(root, "", diags);
  detail::check_schema_version(top);
  ProjectModel m;

  m.phases = read_list<Phase>(top, "phases", true, [&](const json &j, std::string loc) -> std::optional<Phase> {
    ObjectReader r(j, std::move(loc), diags);
    auto id = r.string("id");
    auto name = r.string("name");
    auto order = r.integer("order");
    r.finish();
    if (!id || !name || !order)
      return std::nullopt;
    return Phase{*id, *name, static_cast<int>(*order)};
  });

  m.diagrams = read_list<Diagram>(top, "diagrams", true, [&](const json &j, std::string loc) -> std::optional<Diagram> {
    ObjectReader r(j, std::move(loc), diags);
    auto id = r.string("id");
    auto name = r.string("name");
    auto kind = r.enumeration<DiagramKind>("kind");
    auto phase = r.string("phase");
    r.finish();
    if (!id || !name || !kind || !phase)
      return std::nullopt;
    return Diagram{*id, *name, *kind, *phase};
  });

  m.elements = read_list<ModelElement>(top, "elements", true, [&](const json &j, std::string loc) -> std::optional<ModelElement> {
    ObjectReader r(j, std::move(loc), diags);
    auto id = r.string("id");
    auto name = r.string("name");
    auto kind = r.enumeration<ElementKind>("kind");
    auto diagram = r.string("diagram");
    auto classifier = r.string("classifier", false);
    auto owner = r.string("owner", false);
    r.finish();
    if (!id || !name || !kind || !diagram)
      return std::nullopt;
    return ModelElement{*id, *name, *kind, classifier, *diagram, owner};
  });

  m.intraDeps = read_list<IntraDependency>(
    top, "intraDependencies", false, [&](const json &j, std::string loc) -> std::optional<IntraDependency> {
      ObjectReader r(j, std::move(loc), diags);
      auto target = r.string("target");
      auto source = r.string("source");
      auto kind = r.enumeration<IntraKind>("kind");
      r.finish();
      if (!target || !source || !kind)
        return std::nullopt;
      return IntraDependency{*target, *source, *kind};
    });

  m.bdrs = read_list<Bdr>(top, "bdrs", false, [&](const json &j, std::string loc) -> std::optional<Bdr> {
    ObjectReader r(j, std::move(loc), diags);
    auto target = r.string("target");
    auto source = r.string("source");
    auto kind = r.enumeration<BdrKind>("kind");
    auto trace = r.strings("ruleTrace", false);
    r.finish();
    if (!target || !source || !kind)
      return std::nullopt;
    return Bdr{*target, *source, *kind, trace.value_or(std::vector<std::string>{})};
  });

  top.finish();
  return m;
}

json write_model(const ProjectModel &m)
{
  json j;
  j["schemaVersion"] = std::string(kSchemaVersion);
  j["phases"] = json::array();
  for (const auto &p : m.phases)
    j["phases"].push_back({{"id", p.id}, {"name", p.name}, {"order", p.order}});
  j["diagrams"] = json::array();
  for (const auto &d : m.diagrams)
    j["diagrams"].push_back({{"id", d.id}, {"name", d.name}, {"kind", to_string(d.kind)}, {"phase", d.phase}});
  j["elements"] = json::array();
  for (const auto &e : m.elements) {
    json item{{"id", e.id}, {"name", e.name}, {"kind", to_string(e.kind)}, {"diagram", e.diagram}};
    if (e.classifier)
      item["classifier"] = *e.classifier;
    if (e.owner)
      item["owner"] = *e.owner;
    j["elements"].push_back(std::move(item));
  }
  j["intraDependencies"] = json::array();
  for (const auto &d : m.intraDeps)
    j["intraDependencies"].push_back({{"target", d.target}, {"source", d.source}, {"kind", to_string(d.kind)}});
  j["bdrs"] = json::array();
  for (const auto &b : m.bdrs)
    j["bdrs"].push_back({{"target", b.target}, {"source", b.source}, {"kind", to_string(b.kind)}, {"ruleTrace", b.ruleTrace}});
  return j;
}

} // namespace

ModelDocument parse_model(std::string_view text)
{
  const json root = detail::parse_json_text(text);
  std::vector<Diagnostic> diags;
  ProjectModel model = read_model(root, diags);
  if (diags.empty())
    diags = validate_model(model);
  if (!diags.empty())
    throw DocumentError(std::move(diags));
  return ModelDocument{std::string(kSchemaVersion), std::move(model)};
}

std::string serialize_model(const ModelDocument &doc) { return detail::dump_canonical(write_model(doc.model)); }

// --- scenario --------------------------------------------------------------

ScenarioDocument parse_scenario(std::string_view text)
{
  const json root = detail::parse_json_text(text);
  std::vector<Diagnostic> diags;
  ObjectReader top(root, "", diags);
  detail::check_schema_version(top);
  ScenarioDocument doc;

  doc.workflows = read_list<WorkflowDeclaration>(
    top, "workflows", true, [&](const json &j, std::string loc) -> std::optional<WorkflowDeclaration> {
      ObjectReader r(j, loc, diags);
      auto id = r.string("id");
      auto activities = read_list<ActivityDeclaration>(
        r, "activities", true, [&](const json &aj, std::string aloc) -> std::optional<ActivityDeclaration> {
          ObjectReader ar(aj, aloc, diags);
          auto aid = ar.string("id");
          auto writes = ar.strings("writes", false);
          auto reads = ar.strings("reads", false);
          auto worker = ar.string("worker", false);
          ar.finish();
          if (!aid)
            return std::nullopt;
          ActivityDeclaration decl{*aid, writes.value_or(std::vector<std::string>{}),
                                   reads.value_or(std::vector<std::string>{}), worker};
          std::set<std::string> seen;
          for (const auto &a : decl.writes) {
            if (!seen.insert(a).second)
              ar.fail(DiagnosticCategory::Schema, aloc + ".writes", "duplicate artifact '" + a + "'");
          }
          for (const auto &a : decl.reads) {
            if (!seen.insert(a).second)
              ar.fail(DiagnosticCategory::Schema, aloc + ".reads",
                      "artifact '" + a + "' is declared twice or both read and written");
          }
          return decl;
        });
      r.finish();
      if (!id)
        return std::nullopt;
      std::set<std::string> ids;
      for (std::size_t i = 0; i < activities.size(); ++i) {
        if (!ids.insert(activities[i].id).second)
          r.fail(DiagnosticCategory::Schema, index_locator(loc + ".activities", i) + ".id",
                 "duplicate activity id '" + activities[i].id + "'");
      }
      return WorkflowDeclaration{*id, std::move(activities)};
    });

  std::set<std::string> workflowIds;
  for (std::size_t i = 0; i < doc.workflows.size(); ++i) {
    if (!workflowIds.insert(doc.workflows[i].id).second)
      diags.push_back({DiagnosticCategory::Schema, index_locator("workflows", i) + ".id",
                       "duplicate workflow id '" + doc.workflows[i].id + "'"});
  }

  std::optional<double> previous;
  const json *events = top.array("events", true);
  for (std::size_t i = 0; events && i < events->size(); ++i) {
    const std::string loc = index_locator("events", i);
    ObjectReader r((*events)[i], loc, diags);
    auto time = r.number("time");
    auto workflow = r.string("workflow");
    auto activity = r.string("activity");
    auto artifact = r.string("artifact");
    auto action = r.enumeration<Action>("action");
    r.finish();
    if (!time || !workflow || !activity || !artifact || !action)
      continue;
    if (*time < 0)
      r.fail(DiagnosticCategory::Schema, loc + ".time", "negative time");
    if (previous && *time <= *previous)
      r.fail(DiagnosticCategory::NonMonotonicTime, loc + ".time", "time must be strictly greater than the previous event");
    previous = *time;
    const auto *wf = doc.find(*workflow);
    const auto *act = wf ? wf->find(*activity) : nullptr;
    if (!act) {
      r.fail(DiagnosticCategory::UnknownActivity, loc, "undeclared activity '" + *workflow + "/" + *activity + "'");
    } else if (std::find(act->writes.begin(), act->writes.end(), *artifact) == act->writes.end() &&
               std::find(act->reads.begin(), act->reads.end(), *artifact) == act->reads.end()) {
      r.fail(DiagnosticCategory::Reference, loc + ".artifact",
             "artifact '" + *artifact + "' is neither read nor written by '" + *workflow + "/" + *activity + "'");
    }
    doc.events.push_back(ScenarioEvent{*time, *workflow, *activity, *artifact, *action});
  }
  top.finish();

  if (!diags.empty())
    throw DocumentError(std::move(diags));
  return doc;
}

std::string serialize_scenario(const ScenarioDocument &doc)
{
  json j;
  j["schemaVersion"] = std::string(kSchemaVersion);
  j["workflows"] = json::array();
  for (const auto &w : doc.workflows) {
    json acts = json::array();
    for (const auto &a : w.activities) {
      json item{{"id", a.id}, {"writes", a.writes}, {"reads", a.reads}};
      if (a.worker)
        item["worker"] = *a.worker;
      acts.push_back(std::move(item));
    }
    j["workflows"].push_back({{"id", w.id}, {"activities", std::move(acts)}});
  }
  j["events"] = json::array();
  for (const auto &e : doc.events)
    j["events"].push_back({{"time", e.time},
                           {"workflow", e.workflow},
                           {"activity", e.activity},
                           {"artifact", e.artifact},
                           {"action", to_string(e.action)}});
  return detail::dump_canonical(j);
}

// --- files -----------------------------------------------------------------

std::string read_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw IoError("write failed for '" + path + "'");
}

} // namespace csm
