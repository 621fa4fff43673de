#include "csm/bdr_engine.hpp"

#include "detail/json_reader.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace csm {

namespace {

using C = ComparisonCondition;
using D = DiagramKind;
using E = ElementKind;

const std::vector<ComparisonRow> kComparisonTable = {
  {D::UseCaseDiagram, E::Actor, {C::Include}},
  {D::UseCaseDiagram, E::UseCase, {C::Include}},
  {E::UseCase, D::ClassDiagram, {C::Contained}},
  {E::UseCase, D::StateChartDiagram, {C::Contained}},
  {E::UseCase, D::CollaborationDiagram, {C::Contained}},
  {E::UseCase, D::SequenceDiagram, {C::Contained}},
  {E::UseCase, E::UseCase, {C::Similar}},
  {E::Actor, E::Actor, {C::Similar}},
  {E::Actor, E::Class, {C::Similar}},
  {E::Actor, E::Object, {C::SimType}},
  {D::ClassDiagram, E::Class, {C::Include}},
  {D::ClassDiagram, E::Package, {C::Include}},
  {E::Package, E::Class, {C::Include}},
  {E::Package, E::Package, {C::Similar}},
  {E::Class, E::Package, {C::Similar}},
  {E::Class, E::Object, {C::SimType, C::Contained}},
  {E::Class, D::StateChartDiagram, {C::Contained}},
  {E::Class, D::ActivityDiagram, {C::Contained}},
  {E::Class, E::Class, {C::Similar, C::Include}},
  {D::ObjectDiagram, E::Object, {C::Include}},
  {E::Object, E::Class, {C::TypeSim}},
  {E::Object, D::StateChartDiagram, {C::TypeSim}},
  {E::Object, D::ActivityDiagram, {C::TypeSim}},
  {E::Object, E::Object, {C::Similar, C::Include}},
  {D::ComponentDiagram, E::Component, {C::Include}},
  {E::Component, E::Component, {C::Similar}},
  {D::DeploymentDiagram, E::Node, {C::Include}},
  {E::Node, E::Node, {C::Similar}},
  {D::StateChartDiagram, E::State, {C::Include}},
  {E::State, E::State, {C::Similar, C::Include}},
  {D::ActivityDiagram, E::ActionState, {C::Include}},
  {E::ActionState, E::ActionState, {C::Similar, C::Include}},
  {D::CollaborationDiagram, E::Object, {C::Include}},
  {D::SequenceDiagram, E::Object, {C::Include}},
};

std::optional<Gme> gme_of_kind(ElementKind k)
{
  switch (k) {
  case E::Actor:
  case E::UseCase:
  case E::Class:
  case E::Package:
  case E::Node:
  case E::Component: return Gme::ClassifierElement;
  case E::Relation:
  case E::Aggregation:
  case E::Dependency:
  case E::Generalization:
  case E::Link: return Gme::RelationshipElement;
  case E::State:
  case E::ActionState: return Gme::StateElement;
  case E::Transition:
  case E::Event:
  case E::Action: return Gme::TransitionElement;
  case E::Message: return Gme::MessageElement;
  case E::Object: return std::nullopt;  // depends on the enclosing diagram
  }
  return std::nullopt;
}

Gme gme_of_kind(DiagramKind k)
{
  switch (k) {
  case D::StateChartDiagram:
  case D::ActivityDiagram: return Gme::BehaviorDiagram;
  case D::SequenceDiagram:
  case D::CollaborationDiagram: return Gme::InteractionDiagram;
  default: return Gme::RelationshipDiagram;
  }
}

std::optional<Gme> object_gme(DiagramKind enclosing)
{
  switch (enclosing) {
  case D::ObjectDiagram: return Gme::ClassifierElement;
  case D::CollaborationDiagram:
  case D::SequenceDiagram: return Gme::InstanceElement;
  default: return std::nullopt;
  }
}

std::vector<Gme> possible_gmes(const EntityKind &kind)
{
  if (const auto *d = std::get_if<DiagramKind>(&kind))
    return {gme_of_kind(*d)};
  const auto e = std::get<ElementKind>(kind);
  if (e == E::Object)
    return {Gme::ClassifierElement, Gme::InstanceElement};
  return {*gme_of_kind(e)};
}

bool contained_in(const std::string &needle, const std::string &haystack)
{
  return !needle.empty() && haystack.find(needle) != std::string::npos;
}

bool include_holds(const Entity &target, const Entity &source)
{
  if (target.is_diagram())
    return !source.is_diagram() && source.diagram == target.id;
  return source.owner && *source.owner == target.id;
}

bool condition_holds(ComparisonCondition c, const Entity &target, const Entity &source)
{
  switch (c) {
  case C::Contained: return contained_in(comparison_name(target), comparison_name(source));
  case C::Similar: return similar_names(target, source);
  case C::TypeSim: {
    if (!target.is_element(E::Object) || !target.classifier)
      return false;
    const auto type = normalize_name(*target.classifier);
    return !type.empty() && type == comparison_name(source);
  }
  case C::SimType: {
    if (!source.classifier)
      return false;
    const auto name = comparison_name(target);
    return !name.empty() && name == normalize_name(*source.classifier);
  }
  case C::Include: return include_holds(target, source);
  }
  return false;
}

constexpr std::string_view kRowPrefix = "row:";
constexpr std::string_view kCondPrefix = "cond:";
constexpr std::string_view kGmePrefix = "gme:";
constexpr std::string_view kCellPrefix = "cell:";

std::string gme_pair_name(Gme t, Gme s) { return std::string(to_string(t)) + "<-" + std::string(to_string(s)); }

} // namespace

std::span<const ComparisonRow> comparison_table() { return kComparisonTable; }

const ComparisonRow *find_comparison_row(const EntityKind &target, const EntityKind &source)
{
  auto it = std::find_if(kComparisonTable.begin(), kComparisonTable.end(),
                         [&](const ComparisonRow &r) { return r.target == target && r.source == source; });
  return it == kComparisonTable.end() ? nullptr : &*it;
}

std::string row_name(const ComparisonRow &row) { return entity_kind_name(row.target) + "<-" + entity_kind_name(row.source); }

Gme gme_of(const ModelIndex &index, const Entity &entity)
{
  if (const auto *d = std::get_if<DiagramKind>(&entity.kind))
    return gme_of_kind(*d);
  const auto kind = std::get<ElementKind>(entity.kind);
  if (kind != E::Object)
    return *gme_of_kind(kind);
  const auto &diagram = index.at(entity.diagram);
  if (auto g = object_gme(std::get<DiagramKind>(diagram.kind)))
    return *g;
  throw UnmappedKindError("object '" + entity.id + "' in a " + entity_kind_name(diagram.kind) +
                          " has no generation model element");
}

std::set<ComparisonCondition> compare(const ModelIndex &, const Entity &target, const Entity &source)
{
  std::set<ComparisonCondition> out;
  if (target.id == source.id)
    return out;
  const auto *row = find_comparison_row(target.kind, source.kind);
  if (!row)
    return out;
  for (auto c : row->conditions) {
    if (condition_holds(c, target, source))
      out.insert(c);
  }
  return out;
}

std::set<std::pair<Gme, Gme>> admitted_gme_pairs()
{
  std::set<std::pair<Gme, Gme>> out;
  for (const auto &row : kComparisonTable) {
    for (auto t : possible_gmes(row.target))
      for (auto s : possible_gmes(row.source))
        out.emplace(t, s);
  }
  return out;
}

// --- addition rules ----------------------------------------------------------

const AdditionMatrix &AdditionMatrix::defaults()
{
  static const AdditionMatrix matrix = [] {
    AdditionMatrix m;
    const std::set<BdrKind> all{BdrKind::ExistTogether, BdrKind::InformationSharing, BdrKind::Copy, BdrKind::Concept};
    for (const auto &[t, s] : admitted_gme_pairs()) {
      const auto excluded = [](Gme g) {
        return g == Gme::RelationshipElement || g == Gme::TransitionElement || g == Gme::MessageElement;
      };
      if (!excluded(t) && !excluded(s))
        m.set(t, s, all);
    }
    return m;
  }();
  return matrix;
}

std::set<BdrKind> AdditionMatrix::candidates(Gme target, Gme source) const
{
  auto it = entries_.find({target, source});
  return it == entries_.end() ? std::set<BdrKind>{} : it->second;
}

void AdditionMatrix::set(Gme target, Gme source, std::set<BdrKind> kinds)
{
  if (kinds.empty())
    entries_.erase({target, source});
  else
    entries_[{target, source}] = std::move(kinds);
}

AdditionMatrix AdditionMatrix::from_json(std::string_view text, const AdditionMatrix &base)
{
  const auto root = detail::parse_json_text(text);
  std::vector<Diagnostic> diags;
  detail::ObjectReader top(root, "", diags);
  detail::check_schema_version(top);
  AdditionMatrix m = base;
  if (const auto *entries = top.array("entries")) {
    for (std::size_t i = 0; i < entries->size(); ++i) {
      const auto loc = detail::index_locator("entries", i);
      detail::ObjectReader r((*entries)[i], loc, diags);
      auto target = r.enumeration<Gme>("target");
      auto source = r.enumeration<Gme>("source");
      auto kinds = r.strings("kinds");
      r.finish();
      if (!target || !source || !kinds)
        continue;
      std::set<BdrKind> set;
      for (const auto &k : *kinds) {
        if (auto kind = enum_from_string<BdrKind>(k))
          set.insert(*kind);
        else
          r.fail(DiagnosticCategory::Schema, loc + ".kinds", "unknown BDR kind '" + k + "'");
      }
      m.set(*target, *source, std::move(set));
    }
  }
  top.finish();
  if (!diags.empty())
    throw DocumentError(std::move(diags));
  return m;
}

std::set<BdrKind> candidate_bdrs(Gme target, Gme source, const AdditionMatrix &matrix)
{
  return matrix.candidates(target, source);
}

// --- selection rules ---------------------------------------------------------

std::string_view cell_name(SelectionCell cell)
{
  switch (cell) {
  case SelectionCell::SameDiagram: return "same-diagram";
  case SelectionCell::SamePhaseSameKindSameName: return "same-phase/different-diagram/same-kind/same-name";
  case SelectionCell::SamePhaseSameKindDifferentName: return "same-phase/different-diagram/same-kind/different-name";
  case SelectionCell::SamePhaseDifferentKind: return "same-phase/different-diagram/different-kind";
  case SelectionCell::AdjoiningPhase: return "adjoining-phase";
  case SelectionCell::AdjoiningPhaseSourceEarlier: return "adjoining-phase/source-earlier";
  case SelectionCell::SeparatePhase: return "separate-phase";
  }
  return "";
}

std::optional<SelectionCell> cell_from_name(std::string_view name)
{
  for (int i = 0; i <= static_cast<int>(SelectionCell::SeparatePhase); ++i) {
    const auto cell = static_cast<SelectionCell>(i);
    if (cell_name(cell) == name)
      return cell;
  }
  return std::nullopt;
}

std::optional<BdrKind> cell_kind(SelectionCell cell)
{
  switch (cell) {
  case SelectionCell::SameDiagram: return BdrKind::ExistTogether;
  case SelectionCell::SamePhaseSameKindSameName: return BdrKind::Copy;
  case SelectionCell::SamePhaseDifferentKind: return BdrKind::InformationSharing;
  case SelectionCell::AdjoiningPhase: return BdrKind::Concept;
  default: return std::nullopt;
  }
}

SelectionCell selection_cell(const Entity &target, const Entity &source)
{
  if (same_diagram(target, source))
    return SelectionCell::SameDiagram;
  switch (phase_relation(target.phaseOrder, source.phaseOrder)) {
  case PhaseRelation::Same:
    if (!same_kind(target, source))
      return SelectionCell::SamePhaseDifferentKind;
    return similar_names(target, source) ? SelectionCell::SamePhaseSameKindSameName
                                         : SelectionCell::SamePhaseSameKindDifferentName;
  case PhaseRelation::Adjoining:
    // The source of a Concept dependency is the more concrete, later-phase element.
    return source.phaseOrder > target.phaseOrder ? SelectionCell::AdjoiningPhase
                                                 : SelectionCell::AdjoiningPhaseSourceEarlier;
  case PhaseRelation::Separate: return SelectionCell::SeparatePhase;
  }
  return SelectionCell::SeparatePhase;
}

std::optional<BdrKind> select_bdr(const ModelIndex &index, const CandidatePair &pair, const std::set<BdrKind> &candidates)
{
  const auto kind = cell_kind(selection_cell(index.at(pair.target), index.at(pair.source)));
  if (!kind || !candidates.count(*kind))
    return std::nullopt;
  return kind;
}

// --- pipeline ----------------------------------------------------------------

std::vector<Bdr> generate_bdrs(const ProjectModel &model, const AdditionMatrix &matrix)
{
  const ModelIndex index(model);
  std::vector<Bdr> out;
  std::map<std::tuple<std::string, std::string, BdrKind>, std::ptrdiff_t> rowOf;
  for (const auto &target : index.entities()) {
    for (const auto &source : index.entities()) {
      // 1. extraction of potential pairs
      const auto *row = find_comparison_row(target.kind, source.kind);
      if (!row || target.id == source.id)
        continue;
      const auto matched = compare(index, target, source);
      if (matched.empty())
        continue;
      // 2. generation model elements
      const Gme gt = gme_of(index, target);
      const Gme gs = gme_of(index, source);
      // 3. candidates
      const auto candidates = candidate_bdrs(gt, gs, matrix);
      // 4. selection
      const CandidatePair pair{target.id, source.id, matched};
      const auto kind = select_bdr(index, pair, candidates);
      if (!kind)
        continue;
      // 5. addition
      Bdr bdr{target.id, source.id, *kind, {}};
      bdr.ruleTrace.push_back(std::string(kRowPrefix) + row_name(*row));
      for (auto c : matched)
        bdr.ruleTrace.push_back(std::string(kCondPrefix) + std::string(to_string(c)));
      bdr.ruleTrace.push_back(std::string(kGmePrefix) + gme_pair_name(gt, gs));
      bdr.ruleTrace.push_back(std::string(kCellPrefix) + std::string(cell_name(selection_cell(target, source))));
      rowOf[{bdr.target, bdr.source, bdr.kind}] = row - kComparisonTable.data();
      out.push_back(std::move(bdr));
    }
  }
  // ExistTogether, InformationSharing and Copy are symmetric: when both
  // orientations were produced, keep the one from the earlier table row
  // (lower target id on the same row).
  std::erase_if(out, [&](const Bdr &b) {
    if (b.kind == BdrKind::Concept)
      return false;
    auto reverse = rowOf.find({b.source, b.target, b.kind});
    if (reverse == rowOf.end())
      return false;
    const auto own = rowOf.at({b.target, b.source, b.kind});
    return std::tie(reverse->second, b.source) < std::tie(own, b.target);
  });
  // entities() is id-sorted, so only kind ordering remains.
  std::stable_sort(out.begin(), out.end(), [](const Bdr &a, const Bdr &b) {
    return std::tie(a.target, a.source, a.kind) < std::tie(b.target, b.source, b.kind);
  });
  return merge_bdrs({}, out);
}

std::optional<Bdr> replay_trace(const ModelIndex &index, const Bdr &bdr, const AdditionMatrix &matrix)
{
  const auto *target = index.find(bdr.target);
  const auto *source = index.find(bdr.source);
  if (!target || !source)
    return std::nullopt;

  std::optional<std::string> row;
  std::set<ComparisonCondition> conds;
  std::optional<std::string> gmes;
  std::optional<SelectionCell> cell;
  for (const auto &step : bdr.ruleTrace) {
    std::string_view s(step);
    if (s.starts_with(kRowPrefix))
      row = std::string(s.substr(kRowPrefix.size()));
    else if (s.starts_with(kCondPrefix)) {
      auto c = enum_from_string<ComparisonCondition>(s.substr(kCondPrefix.size()));
      if (!c)
        return std::nullopt;
      conds.insert(*c);
    } else if (s.starts_with(kGmePrefix))
      gmes = std::string(s.substr(kGmePrefix.size()));
    else if (s.starts_with(kCellPrefix))
      cell = cell_from_name(s.substr(kCellPrefix.size()));
  }
  const auto *tableRow = find_comparison_row(target->kind, source->kind);
  if (!tableRow || !row || *row != row_name(*tableRow) || conds.empty() || !gmes || !cell)
    return std::nullopt;
  for (auto c : conds) {
    if (std::find(tableRow->conditions.begin(), tableRow->conditions.end(), c) == tableRow->conditions.end())
      return std::nullopt;
  }
  if (compare(index, *target, *source) != conds)
    return std::nullopt;
  const Gme gt = gme_of(index, *target);
  const Gme gs = gme_of(index, *source);
  if (*gmes != gme_pair_name(gt, gs) || selection_cell(*target, *source) != *cell)
    return std::nullopt;
  const auto kind = select_bdr(index, CandidatePair{target->id, source->id, conds}, candidate_bdrs(gt, gs, matrix));
  if (!kind || *kind != bdr.kind)
    return std::nullopt;
  return Bdr{bdr.target, bdr.source, *kind, bdr.ruleTrace};
}

std::vector<Bdr> merge_bdrs(std::vector<Bdr> existing, const std::vector<Bdr> &extra)
{
  std::vector<Bdr> out;
  auto absorb = [&out](const Bdr &b) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Bdr &o) {
      return o.target == b.target && o.source == b.source && o.kind == b.kind;
    });
    if (it == out.end()) {
      out.push_back(b);
      return;
    }
    for (const auto &step : b.ruleTrace) {
      if (std::find(it->ruleTrace.begin(), it->ruleTrace.end(), step) == it->ruleTrace.end())
        it->ruleTrace.push_back(step);
    }
  };
  for (const auto &b : existing)
    absorb(b);
  for (const auto &b : extra)
    absorb(b);
  return out;
}

} // namespace csm
