#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vergm {

/// Unordered pair of distinct nodes, stored with i < j (0-based).
struct Dyad {
  int i;
  int j;
  bool operator==(const Dyad&) const = default;
};

/// Categorical node attribute: per-node integer codes plus the label each code
/// came from.
struct Attribute {
  std::vector<int> codes;
  std::vector<std::string> labels;
};

/// Undirected binary network without self-links. Adjacency is kept as one bit
/// row per node so neighbourhood intersections are word-wide ANDs.
class Network {
 public:
  Network() = default;
  explicit Network(int n);

  int size() const { return n_; }
  long dyad_count() const { return static_cast<long>(n_) * (n_ - 1) / 2; }
  long edge_count() const { return edges_; }
  int degree(int i) const { return degree_[static_cast<std::size_t>(i)]; }

  bool has_edge(int i, int j) const {
    return (row_ptr(i)[j >> 6] >> (j & 63)) & 1u;
  }
  /// Flips y_ij and y_ji. Throws InvalidDyad when i == j or out of range.
  void toggle(int i, int j);
  void set_edge(int i, int j, bool present);

  /// Number of nodes adjacent to both i and j.
  int common_neighbors(int i, int j) const;
  std::span<const std::uint64_t> row(int i) const {
    return {row_ptr(i), static_cast<std::size_t>(words_)};
  }
  int words_per_row() const { return words_; }

  /// Edges as (i, j) with i < j in row-major order.
  std::vector<Dyad> edges() const;

  void set_attribute(const std::string& name, Attribute attr);
  bool has_attribute(const std::string& name) const { return attrs_.count(name) != 0; }
  /// Throws ConfigError if absent.
  const Attribute& attribute(const std::string& name) const;
  const std::map<std::string, Attribute>& attributes() const { return attrs_; }

  /// Same nodes and attributes, no edges.
  Network empty_copy() const;

  /// Order-independent content hash of adjacency and attributes.
  std::uint64_t hash() const;

  bool operator==(const Network& other) const;

 private:
  const std::uint64_t* row_ptr(int i) const { return bits_.data() + static_cast<std::size_t>(i) * words_; }
  std::uint64_t* row_ptr(int i) { return bits_.data() + static_cast<std::size_t>(i) * words_; }
  void check_dyad(int i, int j) const;

  int n_ = 0;
  int words_ = 0;
  long edges_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<int> degree_;
  std::map<std::string, Attribute> attrs_;
};

/// All dyads of an n-node undirected network in canonical row-major order.
std::vector<Dyad> dyads(int n);

/// Position of (i, j), i < j, in the canonical dyad order.
inline long dyad_index(int n, int i, int j) {
  return static_cast<long>(i) * (2L * n - i - 1) / 2 + (j - i - 1);
}

/// Reads a whitespace-separated edge list of 1-based node pairs; `#` starts a
/// comment. Attribute files hold one label per line, line k for node k.
Network load_network(const std::filesystem::path& edge_list, int n,
                     const std::vector<std::pair<std::string, std::filesystem::path>>& attr_files = {});

void save_edge_list(const Network& net, const std::filesystem::path& path);

/// Reads one attribute file; labels are coded in order of first appearance.
Attribute load_attribute(const std::filesystem::path& path, int n);

}  // namespace vergm
