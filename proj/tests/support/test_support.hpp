#pragma once

#include <filesystem>
#include <string>

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(CIINDEX_FIXTURE_DIR) / name;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ciindex_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
