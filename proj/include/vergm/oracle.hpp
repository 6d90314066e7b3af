#pragma once

#include <Eigen/Dense>

#include "vergm/network.hpp"
#include "vergm/stats.hpp"

namespace vergm {

struct OracleResult {
  double log_z = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Exact ERGM on a tiny node set: sufficient statistics of all
/// 2^{n(n-1)/2} graphs, tabulated once. Graph g has dyad k (canonical order)
/// present iff bit k of g is set.
class ExactErgm {
 public:
  static constexpr int kMaxNodes = 5;

  /// `nodes` supplies n and any attributes; its edges are ignored.
  ExactErgm(const Network& nodes, const ModelSpec& spec);

  int nodes() const { return n_; }
  long graphs() const { return static_cast<long>(table_.rows()); }
  const Eigen::MatrixXd& table() const { return table_; }

  OracleResult at(const Eigen::VectorXd& theta) const;
  double log_z(const Eigen::VectorXd& theta) const;
  /// p(y_g | theta) for every graph g.
  Eigen::VectorXd probabilities(const Eigen::VectorXd& theta) const;
  double log_lik(const Eigen::VectorXd& theta, const Eigen::VectorXd& s_obs) const;
  /// Maximiser of theta^T s_obs - log z(theta). Throws NonConvergence when the
  /// observed statistics sit on the boundary of their convex hull.
  Eigen::VectorXd mle(const Eigen::VectorXd& s_obs) const;

 private:
  int n_;
  Eigen::MatrixXd table_;
};

OracleResult enumerate_oracle(int n, const Eigen::VectorXd& theta, const ModelSpec& spec);
OracleResult enumerate_oracle(const Network& nodes, const Eigen::VectorXd& theta, const ModelSpec& spec);

}  // namespace vergm
