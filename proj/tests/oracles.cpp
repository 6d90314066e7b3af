#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

using vergm::ModelSpec;
using vergm::Network;
using vergm::Term;
using vergm::TermKind;

Adjacency adjacency(const Network& net) {
  const int n = net.size();
  Adjacency y(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && net.has_edge(i, j)) y[i][j] = 1;
  return y;
}

namespace {

// e^phi (1 - (1 - e^-phi)^l)
double geo(double phi, int l) { return std::exp(phi) * (1.0 - std::pow(1.0 - std::exp(-phi), l)); }

double term_value(const Adjacency& y, const Term& t, const Network& attrs) {
  const int n = static_cast<int>(y.size());
  double s = 0.0;
  switch (t.kind) {
    case TermKind::Edges:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s += y[i][j];
      return s;
    case TermKind::NodeMatch: {
      const auto& codes = attrs.attribute(t.attribute).codes;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s += y[i][j] * (codes[i] == codes[j] ? 1 : 0);
      return s;
    }
    case TermKind::Gwd: {
      std::vector<int> D(static_cast<std::size_t>(n), 0);  // D[l] = nodes of degree l
      for (int i = 0; i < n; ++i) {
        int d = 0;
        for (int j = 0; j < n; ++j) d += y[i][j];
        ++D[static_cast<std::size_t>(d)];
      }
      for (int l = 1; l <= n - 1; ++l) s += geo(t.decay, l) * D[static_cast<std::size_t>(l)];
      return s;
    }
    case TermKind::Gwesp: {
      std::vector<int> EP(static_cast<std::size_t>(std::max(n, 1)), 0);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          if (!y[i][j]) continue;
          int sp = 0;
          for (int k = 0; k < n; ++k) sp += y[i][k] * y[j][k];
          ++EP[static_cast<std::size_t>(sp)];
        }
      for (int l = 1; l <= n - 2; ++l) s += geo(t.decay, l) * EP[static_cast<std::size_t>(l)];
      return s;
    }
  }
  throw std::logic_error("unknown term");
}

}  // namespace

Eigen::VectorXd brute_stats(const Adjacency& y, const ModelSpec& spec, const Network& attrs) {
  Eigen::VectorXd s(spec.dim());
  for (int k = 0; k < spec.dim(); ++k) s[k] = term_value(y, spec[k], attrs);
  return s;
}

Eigen::MatrixXd brute_table(const Network& attrs, const ModelSpec& spec) {
  const int n = attrs.size();
  if (n > 6) throw std::invalid_argument("brute_table: too many nodes");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const long graphs = 1L << pairs.size();
  Eigen::MatrixXd table(graphs, spec.dim());
  for (long g = 0; g < graphs; ++g) {
    Adjacency y(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if ((g >> k) & 1) y[pairs[k].first][pairs[k].second] = y[pairs[k].second][pairs[k].first] = 1;
    table.row(g) = brute_stats(y, spec, attrs).transpose();
  }
  return table;
}

Exact brute_moments(const Eigen::MatrixXd& table, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd e = table * theta;
  const double mx = e.maxCoeff();
  const Eigen::VectorXd w = (e.array() - mx).exp().matrix();
  const double z = w.sum();
  Exact r;
  r.log_z = mx + std::log(z);
  r.mean = table.transpose() * w / z;
  const Eigen::MatrixXd c = table.rowwise() - r.mean.transpose();
  r.cov = c.transpose() * w.asDiagonal() * c / z;
  return r;
}

namespace {
// Statistics on the boundary of the hull give a gradient that fades long
// before the iterates diverge; treat anything this large as infinite.
constexpr double kMleBound = 8.0;
}  // namespace

bool brute_mle(const Eigen::MatrixXd& table, const Eigen::VectorXd& s_obs, Eigen::VectorXd& theta) {
  theta = Eigen::VectorXd::Zero(table.cols());
  auto ll = [&](const Eigen::VectorXd& t) { return t.dot(s_obs) - brute_moments(table, t).log_z; };
  double f = ll(theta);
  for (int it = 0; it < 500; ++it) {
    const Exact m = brute_moments(table, theta);
    const Eigen::VectorXd g = s_obs - m.mean;
    if (g.norm() < 1e-12) return theta.cwiseAbs().maxCoeff() < kMleBound;
    Eigen::VectorXd step = m.cov.ldlt().solve(g);
    double a = 1.0;
    while (a > 1e-10) {
      const Eigen::VectorXd next = theta + a * step;
      const double fn = ll(next);
      if (fn >= f) {
        theta = next;
        f = fn;
        break;
      }
      a *= 0.5;
    }
    if (theta.cwiseAbs().maxCoeff() > 30.0) return false;
    if (a <= 1e-10) return g.norm() < 1e-8 && theta.cwiseAbs().maxCoeff() < kMleBound;
  }
  return false;
}

double logistic(int r, double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  switch (r) {
    case 0:
      return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case 1:
      return s;
    case 2:
      return s * (1.0 - s);
  }
  throw std::invalid_argument("logistic: r must be 0, 1 or 2");
}

double dense_b_moment(int r, double m, double v, int points) {
  const double lo = -12.0, hi = 12.0;
  const double h = (hi - lo) / (points - 1);
  double s = 0.0;
  for (int k = 0; k < points; ++k) {
    const double z = lo + k * h;
    const double w = (k == 0 || k == points - 1) ? 0.5 : 1.0;
    s += w * logistic(r, m + v * z) * std::exp(-0.5 * z * z);
  }
  return s * h / std::sqrt(2.0 * M_PI);
}

GridPosterior edges_posterior(int dyads, int edges, double prior_var, double lo, double hi, int points) {
  GridPosterior g;
  const double h = (hi - lo) / (points - 1);
  std::vector<double> lp(static_cast<std::size_t>(points));
  double mx = -INFINITY;
  for (int k = 0; k < points; ++k) {
    const double t = lo + k * h;
    lp[k] = edges * t - dyads * logistic(0, t) - 0.5 * t * t / prior_var - 0.5 * std::log(2.0 * M_PI * prior_var);
    if (lp[k] > mx) {
      mx = lp[k];
      g.mode = t;
    }
  }
  double z = 0.0;
  for (int k = 0; k < points; ++k) z += ((k == 0 || k == points - 1) ? 0.5 : 1.0) * std::exp(lp[k] - mx);
  z *= h;
  g.log_evidence = mx + std::log(z);
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = lo + k * h;
    const double d = std::exp(lp[k] - mx) / z;
    g.theta.push_back(t);
    g.density.push_back(d);
    const double w = ((k == 0 || k == points - 1) ? 0.5 : 1.0) * h;
    m1 += w * d * t;
    m2 += w * d * t * t;
  }
  g.mean = m1;
  g.sd = std::sqrt(m2 - m1 * m1);
  return g;
}

double grid_log_integral(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& centre,
                         const Eigen::MatrixXd& L, double half, double h) {
  const int p = static_cast<int>(centre.size());
  const int m = static_cast<int>(std::lround(2.0 * half / h)) + 1;
  long total = 1;
  for (int k = 0; k < p; ++k) total *= m;
  std::vector<double> vals(static_cast<std::size_t>(total));
  double mx = -INFINITY;
#pragma omp parallel for reduction(max : mx)
  for (long idx = 0; idx < total; ++idx) {
    Eigen::VectorXd z(p);
    long r = idx;
    for (int k = 0; k < p; ++k) {
      z[k] = -half + static_cast<double>(r % m) * h;
      r /= m;
    }
    const double v = f(centre + L * z);
    vals[static_cast<std::size_t>(idx)] = v;
    mx = std::max(mx, v);
  }
  double s = 0.0;
  for (long idx = 0; idx < total; ++idx) s += std::exp(vals[static_cast<std::size_t>(idx)] - mx);
  // Trapezoid end weights are irrelevant here: the integrand is negligible at +-half.
  return mx + std::log(s) + p * std::log(h) + std::log(std::abs(L.determinant()));
}

}  // namespace oracles
