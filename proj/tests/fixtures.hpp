#pragma once

#include <string>
#include <vector>

#include "oracles.hpp"
#include "util.hpp"
#include "vergm/pseudo.hpp"

namespace testutil {

/// Four nodes, path 0-1-2-3: three of six dyads present.
inline vergm::Network four_with_three() {
  vergm::Network net(4);
  net.set_edge(0, 1, true);
  net.set_edge(1, 2, true);
  net.set_edge(2, 3, true);
  return net;
}

/// Adjusted PL for karate from cheap ingredients: the MPLE shifted a little
/// as theta_ML and half the PL Hessian as the covariance.
inline vergm::AdjustedPL cheap_karate(const std::vector<std::string>& terms) {
  const vergm::Network net = karate();
  const vergm::ModelSpec s = vergm::ModelSpec::parse(terms);
  const Eigen::VectorXd pl = vergm::mple(net, s);
  const Eigen::MatrixXd X = vergm::all_change_stats(net, s);
  const Eigen::VectorXd w = (X * pl).unaryExpr([](double x) { return oracles::logistic(2, x); });
  const Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
  Eigen::VectorXd ml = pl;
  ml[0] += 0.1;
  return vergm::assemble_adjusted_pl(net, s, pl, ml, 0.5 * H, -1200.0);
}

}  // namespace testutil
