#pragma once

#include "csm/core_model.hpp"

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace csm {

/// An activity is addressed by its workflow id plus its id inside that workflow.
struct ActivityRef
{
  std::string workflow;
  std::string activity;

  auto operator<=>(const ActivityRef &) const = default;
  bool operator==(const ActivityRef &) const = default;
};

std::string to_string(const ActivityRef &a);

enum class Action { CheckOut, CheckIn };

template <> struct enum_names<Action>
{
  static constexpr std::array<std::string_view, 2> values{"CheckOut", "CheckIn"};
};

enum class AccessMode { Read, Write };

template <> struct enum_names<AccessMode>
{
  static constexpr std::array<std::string_view, 2> values{"Read", "Write"};
};

/// A timestamped check-out or check-in recorded by the artifact store.
/// For a check-out `version` is the version obtained; for a check-in it is the version created.
struct ChangeEvent
{
  std::size_t id = 0;  // position in the log
  double time = 0.0;
  ActivityRef activity;
  std::string artifact;
  Action action = Action::CheckOut;
  int version = 1;
  AccessMode mode = AccessMode::Write;

  bool operator==(const ChangeEvent &) const = default;
};

using EventLog = std::vector<ChangeEvent>;

} // namespace csm
