#include "fixtures.hpp"

#include "csm/model_ingest.hpp"

#include <filesystem>

namespace csm::test {

std::string fixture_path(const std::string &name) { return std::string(CSM_FIXTURE_DIR) + "/" + name; }

std::string golden_path(const std::string &name) { return std::string(CSM_GOLDEN_DIR) + "/" + name; }

std::string read_fixture(const std::string &name) { return read_file(fixture_path(name)); }

ProjectModel load_model_fixture(const std::string &name) { return parse_model(read_fixture(name)).model; }

std::string temp_file(const std::string &name, const std::string &content)
{
  const auto dir = std::filesystem::temp_directory_path() / "csm-tests";
  std::filesystem::create_directories(dir);
  const auto path = (dir / name).string();
  write_file(path, content);
  return path;
}

} // namespace csm::test
