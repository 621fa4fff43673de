#include "csm/impact.hpp"

#include "detail/json_reader.hpp"

#include <deque>
#include <sstream>

namespace csm {

namespace {

bool entity_exists(const ProjectModel &model, std::string_view id)
{
  for (const auto &d : model.diagrams)
    if (d.id == id)
      return true;
  for (const auto &e : model.elements)
    if (e.id == id)
      return true;
  return false;
}

std::string_view kind_color(BdrKind k)
{
  switch (k) {
  case BdrKind::ExistTogether: return "gray40";
  case BdrKind::InformationSharing: return "blue";
  case BdrKind::Copy: return "darkgreen";
  case BdrKind::Concept: return "red";
  }
  return "black";
}

std::string quoted(std::string_view s)
{
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

} // namespace

DependencyGraph dependency_graph(const ProjectModel &model, std::string_view root, const BdrFilter &follow)
{
  if (!entity_exists(model, root))
    throw UnknownRootError("unknown change root '" + std::string(root) + "'");

  std::unordered_map<std::string, std::vector<const Bdr *>> byTarget;
  for (const auto &b : model.bdrs) {
    if (!follow || follow(b))
      byTarget[b.target].push_back(&b);
  }

  DependencyGraph g;
  g.root = std::string(root);
  g.vertices.insert(g.root);
  std::deque<std::string> pending{g.root};
  while (!pending.empty()) {
    const std::string v = std::move(pending.front());
    pending.pop_front();
    auto it = byTarget.find(v);
    if (it == byTarget.end())
      continue;
    for (const Bdr *b : it->second) {
      g.edges.insert(DependencyEdge{b->source, b->target, b->kind});
      if (g.vertices.insert(b->source).second)
        pending.push_back(b->source);
    }
  }
  return g;
}

Reachability::Reachability(const ProjectModel &model)
{
  for (const auto &b : model.bdrs)
    successors_[b.source].push_back(b.target);
  for (const auto &d : model.intraDeps)
    successors_[d.source].push_back(d.target);
}

const std::set<std::string> &Reachability::closure(const std::string &from) const
{
  if (auto it = cache_.find(from); it != cache_.end())
    return it->second;
  std::set<std::string> seen{from};
  std::deque<std::string> pending{from};
  while (!pending.empty()) {
    auto it = successors_.find(pending.front());
    pending.pop_front();
    if (it == successors_.end())
      continue;
    for (const auto &next : it->second) {
      if (seen.insert(next).second)
        pending.push_back(next);
    }
  }
  return cache_.emplace(from, std::move(seen)).first->second;
}

bool Reachability::reaches(const std::string &from, const std::string &to) const { return closure(from).count(to) > 0; }

bool reaches(const ProjectModel &model, const std::string &from, const std::string &to)
{
  return Reachability(model).reaches(from, to);
}

std::string export_dot(const DependencyGraph &graph)
{
  std::ostringstream os;
  os << "digraph dependencies {\n";
  os << "  rankdir=BT;\n";
  os << "  node [shape=box];\n";
  for (const auto &v : graph.vertices) {
    os << "  " << quoted(v);
    if (v == graph.root)
      os << " [penwidth=2]";
    os << ";\n";
  }
  for (const auto &e : graph.edges) {
    os << "  " << quoted(e.source) << " -> " << quoted(e.target) << " [label=" << quoted(to_string(e.kind))
       << ", color=" << kind_color(e.kind) << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string serialize_graph(const DependencyGraph &graph)
{
  detail::json j;
  j["schemaVersion"] = std::string("1");
  j["root"] = graph.root;
  j["vertices"] = graph.vertices;
  j["edges"] = detail::json::array();
  for (const auto &e : graph.edges)
    j["edges"].push_back({{"source", e.source}, {"target", e.target}, {"kind", to_string(e.kind)}});
  return detail::dump_canonical(j);
}

} // namespace csm
