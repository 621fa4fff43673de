#include "csm/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace csm {

// --- errors ----------------------------------------------------------------

std::string to_string(DiagnosticCategory c)
{
  switch (c) {
  case DiagnosticCategory::Syntax: return "SyntaxError";
  case DiagnosticCategory::Schema: return "SchemaError";
  case DiagnosticCategory::Reference: return "ReferenceError";
  case DiagnosticCategory::PhaseOrder: return "PhaseOrderError";
  case DiagnosticCategory::Invariant: return "InvariantError";
  case DiagnosticCategory::UnknownActivity: return "UnknownActivityError";
  case DiagnosticCategory::NonMonotonicTime: return "NonMonotonicTimeError";
  }
  return "Error";
}

std::string to_string(const Diagnostic &d)
{
  std::string out = to_string(d.category);
  if (!d.locator.empty())
    out += " at " + d.locator;
  return out + ": " + d.message;
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic> &diags)
{
  std::ostringstream os;
  for (std::size_t i = 0; i < diags.size(); ++i) {
    if (i)
      os << "\n";
    os << to_string(diags[i]);
  }
  return os.str();
}

} // namespace

DocumentError::DocumentError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

bool DocumentError::has(DiagnosticCategory c) const
{
  return std::any_of(diagnostics_.begin(), diagnostics_.end(), [c](const Diagnostic &d) { return d.category == c; });
}

ProtocolError::ProtocolError(Code code, std::string message, std::string locator)
    : Error(locator.empty() ? message : locator + ": " + message), code_(code), locator_(std::move(locator))
{
}

std::string to_string(ProtocolError::Code c)
{
  switch (c) {
  case ProtocolError::Code::WorkflowNotExecuting: return "WorkflowNotExecutingError";
  case ProtocolError::Code::TimeOrder: return "TimeOrderError";
  case ProtocolError::Code::NoOpenCheckout: return "NoOpenCheckoutError";
  case ProtocolError::Code::RepeatedCheckout: return "RepeatedCheckoutError";
  case ProtocolError::Code::UnknownActivity: return "UnknownActivityError";
  case ProtocolError::Code::UndeclaredArtifact: return "UndeclaredArtifactError";
  }
  return "ProtocolError";
}

// --- entities --------------------------------------------------------------

std::string entity_kind_name(const EntityKind &k)
{
  return std::visit([](auto v) { return std::string(to_string(v)); }, k);
}

ModelIndex::ModelIndex(const ProjectModel &model) : model_(&model)
{
  std::unordered_map<std::string, int> phaseOrder;
  for (const auto &p : model.phases)
    phaseOrder.emplace(p.id, p.order);

  std::unordered_map<std::string, const Diagram *> diagrams;
  for (const auto &d : model.diagrams) {
    auto it = phaseOrder.find(d.phase);
    if (it == phaseOrder.end())
      throw std::invalid_argument("diagram " + d.id + " references unknown phase " + d.phase);
    diagrams.emplace(d.id, &d);
    entities_.push_back(Entity{d.id, d.name, d.kind, std::nullopt, std::nullopt, d.id, it->second});
  }
  for (const auto &e : model.elements) {
    auto it = diagrams.find(e.diagram);
    if (it == diagrams.end())
      throw std::invalid_argument("element " + e.id + " references unknown diagram " + e.diagram);
    entities_.push_back(
      Entity{e.id, e.name, e.kind, e.classifier, e.owner, e.diagram, phaseOrder.at(it->second->phase)});
  }
  std::sort(entities_.begin(), entities_.end(), [](const Entity &a, const Entity &b) { return a.id < b.id; });
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (!byId_.emplace(entities_[i].id, i).second)
      throw std::invalid_argument("duplicate entity id " + entities_[i].id);
  }
}

const Entity *ModelIndex::find(std::string_view id) const
{
  auto it = byId_.find(std::string(id));
  return it == byId_.end() ? nullptr : &entities_[it->second];
}

const Entity &ModelIndex::at(std::string_view id) const
{
  if (const auto *e = find(id))
    return *e;
  throw std::out_of_range("unknown entity " + std::string(id));
}

// --- operations ------------------------------------------------------------

PhaseRelation phase_relation(int orderA, int orderB)
{
  const int gap = std::abs(orderA - orderB);
  if (gap == 0)
    return PhaseRelation::Same;
  return gap == 1 ? PhaseRelation::Adjoining : PhaseRelation::Separate;
}

PhaseRelation phase_relation(const Phase &a, const Phase &b) { return phase_relation(a.order, b.order); }

std::string normalize_name(std::string_view raw)
{
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '_')
      continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  const auto firstNonColon = out.find_first_not_of(':');
  out.erase(0, firstNonColon == std::string::npos ? out.size() : firstNonColon);
  // Plural stripping never applies after another 's', so the result is a fixed point.
  if (out.size() > 3 && out.back() == 's' && out[out.size() - 2] != 's')
    out.pop_back();
  return out;
}

std::string comparison_name(const Entity &e)
{
  if (e.is_element(ElementKind::Object)) {
    const auto colon = e.name.find(':');
    if (colon != std::string::npos)
      return normalize_name(std::string_view(e.name).substr(0, colon));
  }
  return normalize_name(e.name);
}

bool same_diagram(const Entity &a, const Entity &b) { return a.diagram == b.diagram; }

bool same_kind(const Entity &a, const Entity &b) { return a.kind == b.kind; }

bool similar_names(const Entity &a, const Entity &b)
{
  const auto na = comparison_name(a);
  return !na.empty() && na == comparison_name(b);
}

std::optional<std::string> bdr_invariant_violation(const ModelIndex &index, const Bdr &bdr)
{
  if (bdr.target == bdr.source)
    return "target equals source";
  const auto *t = index.find(bdr.target);
  const auto *s = index.find(bdr.source);
  if (!t || !s)
    return "endpoint does not resolve";
  const auto rel = phase_relation(t->phaseOrder, s->phaseOrder);
  switch (bdr.kind) {
  case BdrKind::ExistTogether:
    if (!same_diagram(*t, *s))
      return "ExistTogether requires a shared diagram";
    break;
  case BdrKind::Copy:
    if (rel != PhaseRelation::Same || same_diagram(*t, *s) || !same_kind(*t, *s) || !similar_names(*t, *s))
      return "Copy requires same phase, different diagrams, same kind and equivalent names";
    break;
  case BdrKind::InformationSharing:
    if (rel != PhaseRelation::Same || same_diagram(*t, *s))
      return "InformationSharing requires same phase and different diagrams";
    break;
  case BdrKind::Concept:
    if (rel != PhaseRelation::Adjoining)
      return "Concept requires adjoining phases";
    break;
  }
  return std::nullopt;
}

namespace {

std::string at(std::string_view collection, std::size_t i, std::string_view field = {})
{
  std::string s = std::string(collection) + "[" + std::to_string(i) + "]";
  if (!field.empty())
    s += "." + std::string(field);
  return s;
}

} // namespace

std::vector<Diagnostic> validate_model(const ProjectModel &model)
{
  std::vector<Diagnostic> diags;
  auto report = [&](DiagnosticCategory c, std::string loc, std::string msg) {
    diags.push_back(Diagnostic{c, std::move(loc), std::move(msg)});
  };

  std::set<std::string> phaseIds;
  std::set<int> orders;
  for (std::size_t i = 0; i < model.phases.size(); ++i) {
    const auto &p = model.phases[i];
    if (p.id.empty())
      report(DiagnosticCategory::Schema, at("phases", i, "id"), "empty id");
    if (!phaseIds.insert(p.id).second)
      report(DiagnosticCategory::Schema, at("phases", i, "id"), "duplicate phase id '" + p.id + "'");
    if (p.order < 0)
      report(DiagnosticCategory::PhaseOrder, at("phases", i, "order"), "negative order");
    if (!orders.insert(p.order).second)
      report(DiagnosticCategory::PhaseOrder, at("phases", i, "order"), "duplicate order " + std::to_string(p.order));
  }
  if (!orders.empty() && (*orders.begin() != 0 || *orders.rbegin() != static_cast<int>(orders.size()) - 1))
    report(DiagnosticCategory::PhaseOrder, "phases", "orders must be contiguous from 0");

  std::set<std::string> entityIds;
  std::unordered_map<std::string, const Diagram *> diagrams;
  for (std::size_t i = 0; i < model.diagrams.size(); ++i) {
    const auto &d = model.diagrams[i];
    if (d.id.empty())
      report(DiagnosticCategory::Schema, at("diagrams", i, "id"), "empty id");
    if (!entityIds.insert(d.id).second)
      report(DiagnosticCategory::Schema, at("diagrams", i, "id"), "duplicate entity id '" + d.id + "'");
    diagrams.emplace(d.id, &d);
    if (!phaseIds.count(d.phase))
      report(DiagnosticCategory::Reference, at("diagrams", i, "phase"), "unknown phase id '" + d.phase + "'");
  }

  std::unordered_map<std::string, const ModelElement *> elements;
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const auto &e = model.elements[i];
    if (e.id.empty())
      report(DiagnosticCategory::Schema, at("elements", i, "id"), "empty id");
    if (!entityIds.insert(e.id).second)
      report(DiagnosticCategory::Schema, at("elements", i, "id"), "duplicate entity id '" + e.id + "'");
    elements.emplace(e.id, &e);
    if (!diagrams.count(e.diagram))
      report(DiagnosticCategory::Reference, at("elements", i, "diagram"), "unknown diagram id '" + e.diagram + "'");
    if (e.classifier && e.kind != ElementKind::Object)
      report(DiagnosticCategory::Schema, at("elements", i, "classifier"), "classifier is only allowed on objects");
  }
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const auto &e = model.elements[i];
    if (!e.owner)
      continue;
    if (*e.owner == e.id)
      report(DiagnosticCategory::Invariant, at("elements", i, "owner"), "element owns itself");
    else if (!elements.count(*e.owner))
      report(DiagnosticCategory::Reference, at("elements", i, "owner"), "unknown element id '" + *e.owner + "'");
  }

  for (std::size_t i = 0; i < model.intraDeps.size(); ++i) {
    const auto &dep = model.intraDeps[i];
    auto t = elements.find(dep.target);
    auto s = elements.find(dep.source);
    if (t == elements.end())
      report(DiagnosticCategory::Reference, at("intraDependencies", i, "target"), "unknown element id '" + dep.target + "'");
    if (s == elements.end())
      report(DiagnosticCategory::Reference, at("intraDependencies", i, "source"), "unknown element id '" + dep.source + "'");
    if (t != elements.end() && s != elements.end() && t->second->diagram != s->second->diagram)
      report(DiagnosticCategory::Invariant, at("intraDependencies", i), "endpoints are in different diagrams");
  }

  const bool structural = diags.empty();
  for (std::size_t i = 0; i < model.bdrs.size(); ++i) {
    const auto &b = model.bdrs[i];
    if (!entityIds.count(b.target))
      report(DiagnosticCategory::Reference, at("bdrs", i, "target"), "unknown entity id '" + b.target + "'");
    if (!entityIds.count(b.source))
      report(DiagnosticCategory::Reference, at("bdrs", i, "source"), "unknown entity id '" + b.source + "'");
  }
  // Kind invariants need resolvable phases and diagrams.
  if (structural && diags.empty()) {
    const ModelIndex index(model);
    for (std::size_t i = 0; i < model.bdrs.size(); ++i) {
      if (auto why = bdr_invariant_violation(index, model.bdrs[i]))
        report(DiagnosticCategory::Invariant, at("bdrs", i), *why);
    }
  }
  return diags;
}

} // namespace csm
