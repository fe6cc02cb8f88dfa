#pragma once

// Shared helpers for the unit-test binary.  Kept free of doctest macros so
// the header can be included before or after the framework.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace testutil {

// Runs fn and reports which status it failed with (ok if it returned).
inline dphc::Status status_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const dphc::Error& e) {
    return e.status();
  }
  return dphc::Status::ok;
}

// Scratch directory under the build tree, one per test group.
inline std::filesystem::path artifact_dir(const std::string& name) {
  std::filesystem::path dir =
      std::filesystem::current_path() / "test-artifacts" / name;
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return {};
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

inline void spit(const std::filesystem::path& path,
                 const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

inline bool same_bytes(const std::filesystem::path& a,
                       const std::filesystem::path& b) {
  return slurp(a) == slurp(b) && std::filesystem::file_size(a) > 0;
}

}  // namespace testutil
