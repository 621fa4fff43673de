#pragma once

// Model and scenario documents: parsing, validation and canonical serialization.
//
// Both documents are JSON objects carrying "schemaVersion": "1". Parsing is
// total: it either returns a complete document or throws DocumentError listing
// every violation with a path-like locator such as "elements[3].diagram".

#include "csm/change_event.hpp"
#include "csm/core_model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csm {

inline constexpr std::string_view kSchemaVersion = "1";

struct ModelDocument
{
  std::string schemaVersion{kSchemaVersion};
  ProjectModel model;

  bool operator==(const ModelDocument &) const = default;
};

struct ActivityDeclaration
{
  std::string id;
  std::vector<std::string> writes;
  std::vector<std::string> reads;
  std::optional<std::string> worker;

  bool operator==(const ActivityDeclaration &) const = default;
};

struct WorkflowDeclaration
{
  std::string id;
  std::vector<ActivityDeclaration> activities;

  const ActivityDeclaration *find(std::string_view activity) const;
  bool operator==(const WorkflowDeclaration &) const = default;
};

/// Raw event record; the access mode is implied by the activity's declaration.
struct ScenarioEvent
{
  double time = 0.0;
  std::string workflow;
  std::string activity;
  std::string artifact;
  Action action = Action::CheckOut;

  bool operator==(const ScenarioEvent &) const = default;
};

struct ScenarioDocument
{
  std::string schemaVersion{kSchemaVersion};
  std::vector<WorkflowDeclaration> workflows;
  std::vector<ScenarioEvent> events;

  const WorkflowDeclaration *find(std::string_view workflow) const;
  bool operator==(const ScenarioDocument &) const = default;
};

ModelDocument parse_model(std::string_view text);
std::string serialize_model(const ModelDocument &doc);

ScenarioDocument parse_scenario(std::string_view text);
std::string serialize_scenario(const ScenarioDocument &doc);

/// Reads a whole file; throws IoError when it cannot be read.
std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view content);

class IoError : public Error
{
public:
  using Error::Error;
};

} // namespace csm
