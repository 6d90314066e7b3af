#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "vergm/network.hpp"

#ifndef VERGM_TEST_DATA
#define VERGM_TEST_DATA "data"
#endif

namespace testutil {

inline std::filesystem::path karate_path() { return std::filesystem::path(VERGM_TEST_DATA) / "karate.edgelist"; }
inline vergm::Network karate() { return vergm::load_network(karate_path(), 34); }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vergm-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

/// Erdos-Renyi graph with edge probability p from a simple LCG, so tests do
/// not depend on the library's own generators.
inline vergm::Network random_graph(int n, double p, unsigned long long seed) {
  vergm::Network net(n);
  unsigned long long x = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      x = x * 6364136223846793005ULL + 1442695040888963407ULL;
      if (static_cast<double>(x >> 11) * 0x1.0p-53 < p) net.set_edge(i, j, true);
    }
  return net;
}

}  // namespace testutil
