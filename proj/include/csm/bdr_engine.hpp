#pragma once

// BDR generation: comparison rules, generation model elements,
// addition rules and selection rules, plus the five-step generation pipeline.

#include "csm/core_model.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csm {

enum class ComparisonCondition { Contained, Similar, TypeSim, SimType, Include };

template <> struct enum_names<ComparisonCondition>
{
  static constexpr std::array<std::string_view, 5> values{"Contained", "Similar", "TypeSim", "SimType", "Include"};
};

enum class Gme {
  ClassifierElement,
  RelationshipElement,
  StateElement,
  TransitionElement,
  InstanceElement,
  MessageElement,
  RelationshipDiagram,
  BehaviorDiagram,
  InteractionDiagram,
};

template <> struct enum_names<Gme>
{
  static constexpr std::array<std::string_view, 9> values{
    "ClassifierElement", "RelationshipElement", "StateElement",        "TransitionElement",  "InstanceElement",
    "MessageElement",    "RelationshipDiagram", "BehaviorDiagram",     "InteractionDiagram",
  };
};

/// One row of the comparison table: which conditions apply to a (target kind, source kind) pair.
struct ComparisonRow
{
  EntityKind target;
  EntityKind source;
  std::vector<ComparisonCondition> conditions;
};

std::span<const ComparisonRow> comparison_table();
const ComparisonRow *find_comparison_row(const EntityKind &target, const EntityKind &source);
std::string row_name(const ComparisonRow &row);

struct CandidatePair
{
  std::string target;
  std::string source;
  std::set<ComparisonCondition> matchedConditions;
};

/// Maps an entity to its generation model element. Objects are classified by
/// the diagram they appear in. Throws UnmappedKindError for unmapped kinds.
Gme gme_of(const ModelIndex &index, const Entity &entity);

/// Conditions of the table row for (target, source) whose predicate holds.
std::set<ComparisonCondition> compare(const ModelIndex &index, const Entity &target, const Entity &source);

/// GME pairs that at least one comparison-table row can produce.
std::set<std::pair<Gme, Gme>> admitted_gme_pairs();

/// Addition rules: BDR kinds allowed between two generation model elements.
class AdditionMatrix
{
public:
  /// All four kinds for every admitted GME pair; nothing elsewhere.
  static const AdditionMatrix &defaults();

  std::set<BdrKind> candidates(Gme target, Gme source) const;
  void set(Gme target, Gme source, std::set<BdrKind> kinds);

  /// Applies an override document: {"schemaVersion":"1","entries":[{"target","source","kinds":[...]}]}.
  /// Listed pairs replace their default entry. Throws DocumentError.
  static AdditionMatrix from_json(std::string_view text, const AdditionMatrix &base = defaults());

  bool operator==(const AdditionMatrix &) const = default;

private:
  std::map<std::pair<Gme, Gme>, std::set<BdrKind>> entries_;
};

std::set<BdrKind> candidate_bdrs(Gme target, Gme source, const AdditionMatrix &matrix = AdditionMatrix::defaults());

/// Cells of the selection table.
enum class SelectionCell {
  SameDiagram,
  SamePhaseSameKindSameName,
  SamePhaseSameKindDifferentName,
  SamePhaseDifferentKind,
  AdjoiningPhase,
  AdjoiningPhaseSourceEarlier,
  SeparatePhase,
};

std::string_view cell_name(SelectionCell cell);
std::optional<SelectionCell> cell_from_name(std::string_view name);
std::optional<BdrKind> cell_kind(SelectionCell cell);

SelectionCell selection_cell(const Entity &target, const Entity &source);

/// Selection rules; the result must also be one of `candidates`.
std::optional<BdrKind> select_bdr(const ModelIndex &index, const CandidatePair &pair, const std::set<BdrKind> &candidates);

/// Runs the five generation steps over every ordered entity pair.
/// Output is deduplicated per (target, source, kind) and sorted. Symmetric
/// kinds keep a single orientation per entity pair.
std::vector<Bdr> generate_bdrs(const ProjectModel &model, const AdditionMatrix &matrix = AdditionMatrix::defaults());

/// Re-derives a generated BDR from its rule trace. Returns nullopt when the
/// trace does not reproduce the BDR.
std::optional<Bdr> replay_trace(const ModelIndex &index, const Bdr &bdr, const AdditionMatrix &matrix = AdditionMatrix::defaults());

/// Merges `extra` into `existing` without duplicating (target, source, kind).
std::vector<Bdr> merge_bdrs(std::vector<Bdr> existing, const std::vector<Bdr> &extra);

} // namespace csm
