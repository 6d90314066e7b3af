#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vergm/network.hpp"

namespace vergm {

using StatVector = Eigen::VectorXd;

enum class TermKind { Edges, Gwesp, Gwd, NodeMatch };

/// One sufficient-statistic term. Decays are fixed constants, never estimated.
struct Term {
  TermKind kind = TermKind::Edges;
  double decay = 0.0;
  std::string attribute;

  /// Parses "edges", "gwesp:0.2", "gwd:0.8" or "nodematch:drugs".
  static Term parse(std::string_view text);
  /// Inverse of parse; also used as the parameter name in output files.
  std::string name() const;
  bool operator==(const Term&) const = default;
};

class ModelSpec {
 public:
  ModelSpec() = default;
  explicit ModelSpec(std::vector<Term> terms);
  static ModelSpec parse(const std::vector<std::string>& terms);

  int dim() const { return static_cast<int>(terms_.size()); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& operator[](int k) const { return terms_[static_cast<std::size_t>(k)]; }
  std::vector<std::string> names() const;
  bool edges_first() const { return !terms_.empty() && terms_.front().kind == TermKind::Edges; }

  /// Throws ConfigError if a nodematch attribute is missing from `net`.
  void validate(const Network& net) const;

  bool operator==(const ModelSpec&) const = default;

 private:
  std::vector<Term> terms_;
};

/// A ModelSpec bound to a network's attributes with the geometric weight
/// tables precomputed. Evaluation works on any network with the same node set.
class StatEvaluator {
 public:
  StatEvaluator(const ModelSpec& spec, const Network& net);

  int dim() const { return static_cast<int>(terms_.size()); }

  /// s(y).
  StatVector suff_stats(const Network& net) const;
  /// s(y with y_ij = 1) - s(y with y_ij = 0); the current value of y_ij is
  /// ignored. `out` must have dim() entries.
  void change_stats(const Network& net, int i, int j, std::span<double> out) const;

 private:
  struct Bound {
    TermKind kind;
    double scale = 1.0;            // e^decay
    std::vector<double> ratio_pow;  // (1 - e^-decay)^l, l = 0..n
    const std::vector<int>* codes = nullptr;
  };
  double weight(const Bound& b, int l) const { return b.scale * (1.0 - b.ratio_pow[static_cast<std::size_t>(l)]); }

  std::vector<Bound> terms_;
};

StatVector suff_stats(const Network& net, const ModelSpec& spec);
StatVector change_stats(const Network& net, int i, int j, const ModelSpec& spec);
/// One row per dyad in canonical order, each evaluated on the observed network.
Eigen::MatrixXd all_change_stats(const Network& net, const ModelSpec& spec);
/// Observed dyad values y_ij in canonical order.
Eigen::VectorXd dyad_values(const Network& net);

}  // namespace vergm
