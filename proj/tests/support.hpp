#pragma once

#include <filesystem>
#include <string>

#include "symgen/font_catalog.hpp"

namespace symgen::test {

inline std::filesystem::path font_dir() { return SYMGEN_TEST_FONT_DIR; }
inline std::filesystem::path blacklist() { return std::filesystem::path(SYMGEN_DATA_DIR) / "blacklist.txt"; }

/// Shared catalog over the test font corpus.
inline const FontCatalog& catalog() {
  static const FontCatalog c = FontCatalog::load(font_dir(), blacklist());
  return c;
}

/// Fresh empty directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::path(SYMGEN_TEST_SCRATCH) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace symgen::test
