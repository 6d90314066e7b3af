#include "vergm/stats.hpp"

#include <bit>
#include <cmath>
#include <charconv>

#include "vergm/error.hpp"

namespace vergm {

Term Term::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string head(text.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
  Term t;
  if (head == "edges") {
    if (!arg.empty()) throw ConfigError("term 'edges' takes no argument");
    t.kind = TermKind::Edges;
    return t;
  }
  if (head == "nodematch") {
    if (arg.empty()) throw ConfigError("nodematch needs an attribute name, e.g. nodematch:drugs");
    t.kind = TermKind::NodeMatch;
    t.attribute = arg;
    return t;
  }
  if (head == "gwesp" || head == "gwd") {
    t.kind = head == "gwesp" ? TermKind::Gwesp : TermKind::Gwd;
    if (arg.empty()) throw ConfigError("term '" + head + "' needs a decay, e.g. " + head + ":0.5");
    std::size_t used = 0;
    try {
      t.decay = std::stod(arg, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != arg.size() || !std::isfinite(t.decay) || t.decay < 0)
      throw ConfigError("invalid decay '" + arg + "' for term '" + head + "'");
    return t;
  }
  throw ConfigError("unknown term '" + std::string(text) + "'");
}

std::string Term::name() const {
  switch (kind) {
    case TermKind::Edges:
      return "edges";
    case TermKind::NodeMatch:
      return "nodematch:" + attribute;
    case TermKind::Gwesp:
    case TermKind::Gwd: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, decay);
      return (kind == TermKind::Gwesp ? "gwesp:" : "gwd:") + std::string(buf, res.ptr);
    }
  }
  return {};
}

ModelSpec::ModelSpec(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ConfigError("model needs at least one term");
}

ModelSpec ModelSpec::parse(const std::vector<std::string>& terms) {
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(Term::parse(t));
  return ModelSpec(std::move(out));
}

std::vector<std::string> ModelSpec::names() const {
  std::vector<std::string> out;
  for (const auto& t : terms_) out.push_back(t.name());
  return out;
}

void ModelSpec::validate(const Network& net) const {
  for (const auto& t : terms_)
    if (t.kind == TermKind::NodeMatch && !net.has_attribute(t.attribute))
      throw ConfigError("term '" + t.name() + "' refers to missing attribute '" + t.attribute + "'");
}

StatEvaluator::StatEvaluator(const ModelSpec& spec, const Network& net) {
  spec.validate(net);
  const int n = net.size();
  for (const Term& t : spec.terms()) {
    Bound b;
    b.kind = t.kind;
    if (t.kind == TermKind::Gwesp || t.kind == TermKind::Gwd) {
      b.scale = std::exp(t.decay);
      const double r = -std::expm1(-t.decay);
      b.ratio_pow.resize(static_cast<std::size_t>(n) + 1);
      double p = 1.0;
      for (int l = 0; l <= n; ++l, p *= r) b.ratio_pow[static_cast<std::size_t>(l)] = p;
    } else if (t.kind == TermKind::NodeMatch) {
      b.codes = &net.attribute(t.attribute).codes;
    }
    terms_.push_back(std::move(b));
  }
}

StatVector StatEvaluator::suff_stats(const Network& net) const {
  const int n = net.size();
  StatVector s = StatVector::Zero(dim());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const Bound& b = terms_[k];
    double v = 0.0;
    switch (b.kind) {
      case TermKind::Edges:
        v = static_cast<double>(net.edge_count());
        break;
      case TermKind::Gwd:
        for (int i = 0; i < n; ++i) v += weight(b, net.degree(i));
        break;
      case TermKind::Gwesp:
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (net.has_edge(i, j)) v += weight(b, net.common_neighbors(i, j));
        break;
      case TermKind::NodeMatch:
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (net.has_edge(i, j) && (*b.codes)[static_cast<std::size_t>(i)] == (*b.codes)[static_cast<std::size_t>(j)])
              v += 1.0;
        break;
    }
    s[static_cast<Eigen::Index>(k)] = v;
  }
  return s;
}

void StatEvaluator::change_stats(const Network& net, int i, int j, std::span<double> out) const {
  // Quantities are taken on the network with y_ij = 0: when the tie is present
  // it is a shared partner of (i, k) and (j, k) for every common neighbour k.
  const int present = net.has_edge(i, j) ? 1 : 0;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const Bound& b = terms_[k];
    double v = 0.0;
    switch (b.kind) {
      case TermKind::Edges:
        v = 1.0;
        break;
      case TermKind::Gwd:
        v = b.ratio_pow[static_cast<std::size_t>(net.degree(i) - present)] +
            b.ratio_pow[static_cast<std::size_t>(net.degree(j) - present)];
        break;
      case TermKind::Gwesp: {
        const auto ri = net.row(i);
        const auto rj = net.row(j);
        int shared = 0;
        for (int w = 0; w < net.words_per_row(); ++w) {
          std::uint64_t common = ri[static_cast<std::size_t>(w)] & rj[static_cast<std::size_t>(w)];
          while (common) {
            const int node = w * 64 + std::countr_zero(common);
            common &= common - 1;
            ++shared;
            v += b.ratio_pow[static_cast<std::size_t>(net.common_neighbors(i, node) - present)] +
                 b.ratio_pow[static_cast<std::size_t>(net.common_neighbors(j, node) - present)];
          }
        }
        v += weight(b, shared);
        break;
      }
      case TermKind::NodeMatch:
        v = (*b.codes)[static_cast<std::size_t>(i)] == (*b.codes)[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
        break;
    }
    out[k] = v;
  }
}

StatVector suff_stats(const Network& net, const ModelSpec& spec) { return StatEvaluator(spec, net).suff_stats(net); }

StatVector change_stats(const Network& net, int i, int j, const ModelSpec& spec) {
  if (i == j) throw InvalidDyad("change statistics need i != j");
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= net.size()) throw InvalidDyad("dyad out of range");
  StatEvaluator ev(spec, net);
  StatVector out(spec.dim());
  ev.change_stats(net, i, j, {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

Eigen::MatrixXd all_change_stats(const Network& net, const ModelSpec& spec) {
  StatEvaluator ev(spec, net);
  const int n = net.size();
  Eigen::MatrixXd rows(net.dyad_count(), spec.dim());
  std::vector<double> buf(static_cast<std::size_t>(spec.dim()));
  long r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++r) {
      ev.change_stats(net, i, j, buf);
      for (int k = 0; k < spec.dim(); ++k) rows(r, k) = buf[static_cast<std::size_t>(k)];
    }
  return rows;
}

Eigen::VectorXd dyad_values(const Network& net) {
  const int n = net.size();
  Eigen::VectorXd y(net.dyad_count());
  long r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) y[r++] = net.has_edge(i, j) ? 1.0 : 0.0;
  return y;
}

}  // namespace vergm
