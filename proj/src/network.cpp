#include "vergm/network.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "vergm/error.hpp"
#include "vergm/rng.hpp"

namespace vergm {

Network::Network(int n) : n_(n) {
  if (n <= 0) throw ConfigError("network must have at least one node");
  words_ = (n + 63) / 64;
  bits_.assign(static_cast<std::size_t>(n) * words_, 0);
  degree_.assign(static_cast<std::size_t>(n), 0);
}

void Network::check_dyad(int i, int j) const {
  if (i == j) throw InvalidDyad("self-link (" + std::to_string(i) + ", " + std::to_string(j) + ") is not a dyad");
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw InvalidDyad("dyad (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range for n = " +
                      std::to_string(n_));
}

void Network::toggle(int i, int j) {
  check_dyad(i, j);
  const bool was = has_edge(i, j);
  row_ptr(i)[j >> 6] ^= std::uint64_t{1} << (j & 63);
  row_ptr(j)[i >> 6] ^= std::uint64_t{1} << (i & 63);
  const int d = was ? -1 : 1;
  degree_[static_cast<std::size_t>(i)] += d;
  degree_[static_cast<std::size_t>(j)] += d;
  edges_ += d;
}

void Network::set_edge(int i, int j, bool present) {
  check_dyad(i, j);
  if (has_edge(i, j) != present) toggle(i, j);
}

int Network::common_neighbors(int i, int j) const {
  const std::uint64_t* a = row_ptr(i);
  const std::uint64_t* b = row_ptr(j);
  int c = 0;
  for (int w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

std::vector<Dyad> Network::edges() const {
  std::vector<Dyad> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (has_edge(i, j)) out.push_back({i, j});
  return out;
}

void Network::set_attribute(const std::string& name, Attribute attr) {
  if (static_cast<int>(attr.codes.size()) != n_)
    throw ConfigError("attribute '" + name + "' has " + std::to_string(attr.codes.size()) + " entries, expected " +
                      std::to_string(n_));
  attrs_[name] = std::move(attr);
}

const Attribute& Network::attribute(const std::string& name) const {
  auto it = attrs_.find(name);
  if (it == attrs_.end()) throw ConfigError("network has no attribute '" + name + "'");
  return it->second;
}

Network Network::empty_copy() const {
  Network out(n_);
  out.attrs_ = attrs_;
  return out;
}

std::uint64_t Network::hash() const {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(n_));
  for (std::uint64_t w : bits_) h = splitmix64(h ^ w);
  for (const auto& [name, attr] : attrs_) {
    h = splitmix64(h ^ fnv1a(name));
    for (int c : attr.codes) h = splitmix64(h ^ static_cast<std::uint64_t>(c));
  }
  return h;
}

bool Network::operator==(const Network& other) const {
  if (n_ != other.n_ || bits_ != other.bits_) return false;
  if (attrs_.size() != other.attrs_.size()) return false;
  for (const auto& [name, attr] : attrs_) {
    auto it = other.attrs_.find(name);
    if (it == other.attrs_.end() || it->second.codes != attr.codes) return false;
  }
  return true;
}

std::vector<Dyad> dyads(int n) {
  std::vector<Dyad> out;
  out.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

Network load_network(const std::filesystem::path& edge_list, int n,
                     const std::vector<std::pair<std::string, std::filesystem::path>>& attr_files) {
  std::ifstream in(edge_list);
  if (!in) throw IoError("cannot open edge list '" + edge_list.string() + "'");
  Network net(n);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    std::string a, b, extra;
    if (!(ss >> a)) continue;
    if (!(ss >> b) || (ss >> extra)) throw ParseError(edge_list.string(), lineno, "expected two node indices");
    long u = 0, v = 0;
    try {
      std::size_t pa = 0, pb = 0;
      u = std::stol(a, &pa);
      v = std::stol(b, &pb);
      if (pa != a.size() || pb != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ParseError(edge_list.string(), lineno, "node indices must be integers");
    }
    if (u < 1 || v < 1 || u > n || v > n)
      throw ParseError(edge_list.string(), lineno, "node index out of range [1, " + std::to_string(n) + "]");
    if (u == v) throw ParseError(edge_list.string(), lineno, "self-link");
    net.set_edge(static_cast<int>(u - 1), static_cast<int>(v - 1), true);
  }
  for (const auto& [name, path] : attr_files) net.set_attribute(name, load_attribute(path, n));
  return net;
}

Attribute load_attribute(const std::filesystem::path& path, int n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open attribute file '" + path.string() + "'");
  Attribute attr;
  std::map<std::string, int> dict;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    std::string tok;
    if (!(ss >> tok)) continue;
    auto [it, inserted] = dict.try_emplace(tok, static_cast<int>(dict.size()));
    if (inserted) attr.labels.push_back(tok);
    attr.codes.push_back(it->second);
  }
  if (static_cast<int>(attr.codes.size()) != n)
    throw ParseError(path.string(), lineno,
                     "expected " + std::to_string(n) + " attribute values, found " + std::to_string(attr.codes.size()));
  return attr;
}

void save_edge_list(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const Dyad& d : net.edges()) out << d.i + 1 << ' ' << d.j + 1 << '\n';
}

}  // namespace vergm
