#pragma once

#include "csm/core_model.hpp"

#include <compare>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace csm {

/// Edge directed from the BDR's source to its target.
struct DependencyEdge
{
  std::string source;
  std::string target;
  BdrKind kind = BdrKind::ExistTogether;

  auto operator<=>(const DependencyEdge &) const = default;
  bool operator==(const DependencyEdge &) const = default;
};

struct DependencyGraph
{
  std::string root;
  std::set<std::string> vertices;
  std::set<DependencyEdge> edges;

  bool operator==(const DependencyGraph &) const = default;
};

/// Decides whether a BDR is followed while growing the graph. Empty means "follow all".
using BdrFilter = std::function<bool(const Bdr &)>;

/// Fixed point of: for every vertex v and every BDR targeting v, add the BDR's
/// source and the source->target edge. Throws UnknownRootError.
DependencyGraph dependency_graph(const ProjectModel &model, std::string_view root, const BdrFilter &follow = {});

/// Transitive "depends on" over BDRs and intra-dependencies (source -> target
/// steps). Per-origin closures are computed lazily and cached.
class Reachability
{
public:
  explicit Reachability(const ProjectModel &model);

  /// True iff `from` transitively depends on `to`; reflexive.
  bool reaches(const std::string &from, const std::string &to) const;

private:
  const std::set<std::string> &closure(const std::string &from) const;

  std::unordered_map<std::string, std::vector<std::string>> successors_;
  mutable std::unordered_map<std::string, std::set<std::string>> cache_;
};

bool reaches(const ProjectModel &model, const std::string &from, const std::string &to);

/// Graphviz text. One color per BDR kind; nodes and edges in sorted order.
std::string export_dot(const DependencyGraph &graph);

/// Machine-readable graph document (schemaVersion "1").
std::string serialize_graph(const DependencyGraph &graph);

} // namespace csm
