#pragma once

#include "csm/errors.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace csm {

// ---------------------------------------------------------------------------
// Enumerations with stable textual names (used verbatim in every document).
// ---------------------------------------------------------------------------

template <typename E> struct enum_names;

template <typename E> std::string_view to_string(E e) requires requires { enum_names<E>::values; }
{
  return enum_names<E>::values[static_cast<std::size_t>(e)];
}

template <typename E> std::optional<E> enum_from_string(std::string_view s)
{
  const auto &names = enum_names<E>::values;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s)
      return static_cast<E>(i);
  }
  return std::nullopt;
}

enum class DiagramKind {
  UseCaseDiagram,
  ClassDiagram,
  ObjectDiagram,
  ComponentDiagram,
  DeploymentDiagram,
  StateChartDiagram,
  ActivityDiagram,
  SequenceDiagram,
  CollaborationDiagram,
};

template <> struct enum_names<DiagramKind>
{
  static constexpr std::array<std::string_view, 9> values{
    "UseCaseDiagram",    "ClassDiagram",    "ObjectDiagram",   "ComponentDiagram",     "DeploymentDiagram",
    "StateChartDiagram", "ActivityDiagram", "SequenceDiagram", "CollaborationDiagram",
  };
};

enum class ElementKind {
  Actor,
  UseCase,
  Class,
  Package,
  Node,
  Component,
  Object,
  Relation,
  Aggregation,
  Dependency,
  Generalization,
  Link,
  State,
  ActionState,
  Transition,
  Event,
  Action,
  Message,
};

template <> struct enum_names<ElementKind>
{
  static constexpr std::array<std::string_view, 18> values{
    "Actor",      "UseCase",    "Class",      "Package", "Node",  "Component",
    "Object",     "Relation",   "Aggregation", "Dependency", "Generalization", "Link",
    "State",      "ActionState", "Transition", "Event",   "Action", "Message",
  };
};

enum class BdrKind { ExistTogether, InformationSharing, Copy, Concept };

template <> struct enum_names<BdrKind>
{
  static constexpr std::array<std::string_view, 4> values{"ExistTogether", "InformationSharing", "Copy", "Concept"};
};

enum class IntraKind { Generalization, Association, Aggregation, Composition, Call, Instantiation, Send, Parameter, Other };

template <> struct enum_names<IntraKind>
{
  static constexpr std::array<std::string_view, 9> values{
    "Generalization", "Association", "Aggregation", "Composition", "Call", "Instantiation", "Send", "Parameter", "Other",
  };
};

enum class PhaseRelation { Same, Adjoining, Separate };

template <> struct enum_names<PhaseRelation>
{
  static constexpr std::array<std::string_view, 3> values{"Same", "Adjoining", "Separate"};
};

// ---------------------------------------------------------------------------
// Model data. Plain values; cross references are by id.
// ---------------------------------------------------------------------------

struct Phase
{
  std::string id;
  std::string name;
  int order = 0;

  bool operator==(const Phase &) const = default;
};

struct Diagram
{
  std::string id;
  std::string name;
  DiagramKind kind = DiagramKind::ClassDiagram;
  std::string phase;

  bool operator==(const Diagram &) const = default;
};

struct ModelElement
{
  std::string id;
  std::string name;
  ElementKind kind = ElementKind::Class;
  std::optional<std::string> classifier;  // type part of an object label, e.g. ":FloorLampInterfaces"
  std::string diagram;
  std::optional<std::string> owner;  // enclosing element (package member, nested state)

  bool operator==(const ModelElement &) const = default;
};

/// Directed dependency: a change to the target may affect the source.
struct Bdr
{
  std::string target;
  std::string source;
  BdrKind kind = BdrKind::ExistTogether;
  std::vector<std::string> ruleTrace;

  bool operator==(const Bdr &) const = default;
};

struct IntraDependency
{
  std::string target;
  std::string source;
  IntraKind kind = IntraKind::Other;

  bool operator==(const IntraDependency &) const = default;
};

struct ProjectModel
{
  std::vector<Phase> phases;
  std::vector<Diagram> diagrams;
  std::vector<ModelElement> elements;
  std::vector<IntraDependency> intraDeps;
  std::vector<Bdr> bdrs;

  bool operator==(const ProjectModel &) const = default;
};

// ---------------------------------------------------------------------------
// Entity view: diagrams and elements through one lens.
// ---------------------------------------------------------------------------

using EntityKind = std::variant<ElementKind, DiagramKind>;

std::string entity_kind_name(const EntityKind &k);

struct Entity
{
  std::string id;
  std::string name;
  EntityKind kind;
  std::optional<std::string> classifier;
  std::optional<std::string> owner;
  std::string diagram;  // the diagram itself for diagram entities
  int phaseOrder = 0;

  bool is_diagram() const noexcept { return std::holds_alternative<DiagramKind>(kind); }
  bool is_element(ElementKind k) const noexcept
  {
    const auto *e = std::get_if<ElementKind>(&kind);
    return e && *e == k;
  }
};

/// Read-only id index over a structurally valid ProjectModel.
/// Throws std::invalid_argument when a reference does not resolve.
class ModelIndex
{
public:
  explicit ModelIndex(const ProjectModel &model);

  const ProjectModel &model() const noexcept { return *model_; }

  const Entity *find(std::string_view id) const;
  const Entity &at(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  /// Diagrams and elements, sorted by id.
  const std::vector<Entity> &entities() const noexcept { return entities_; }

private:
  const ProjectModel *model_;
  std::vector<Entity> entities_;
  std::unordered_map<std::string, std::size_t> byId_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

PhaseRelation phase_relation(int orderA, int orderB);
PhaseRelation phase_relation(const Phase &a, const Phase &b);

/// Canonical form used for every name comparison.
std::string normalize_name(std::string_view raw);

/// Name of an entity as used by name-based rules: an object's instance name
/// is the text before ':' (empty for anonymous objects such as ":Door").
std::string comparison_name(const Entity &e);

bool same_diagram(const Entity &a, const Entity &b);
bool same_kind(const Entity &a, const Entity &b);
bool similar_names(const Entity &a, const Entity &b);

/// Returns a description of the broken kind invariant, or nullopt when `bdr` is sound.
std::optional<std::string> bdr_invariant_violation(const ModelIndex &index, const Bdr &bdr);

/// Full structural and semantic validation. Empty result means valid.
std::vector<Diagnostic> validate_model(const ProjectModel &model);

} // namespace csm
