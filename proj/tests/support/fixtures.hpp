#pragma once

#include "csm/core_model.hpp"

#include <string>

namespace csm::test {

std::string fixture_path(const std::string &name);
std::string golden_path(const std::string &name);
std::string read_fixture(const std::string &name);
ProjectModel load_model_fixture(const std::string &name);

/// Writes `content` to a fresh file under the system temp directory and returns its path.
std::string temp_file(const std::string &name, const std::string &content = {});

} // namespace csm::test
