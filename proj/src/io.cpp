#include "vergm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "vergm/error.hpp"

namespace vergm {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

Eigen::VectorXd json_vec(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

Eigen::MatrixXd json_mat(const json& a, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()), cols);
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (static_cast<Eigen::Index>(a[r].size()) != cols) throw IoError("ragged matrix in JSON file");
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = a[r][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

std::string hex64(std::uint64_t x) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << x;
  return ss.str();
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw IoError(where + ": not a number: '" + text + "'");
  return v;
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) throw ConfigError("CSV header does not match columns");
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
    out << '\n';
  }
}

TableCsv read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  TableCsv t;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header");
  t.header = split_csv(line);
  std::vector<std::vector<double>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != t.header.size()) throw ParseError(path.string(), lineno, "wrong number of columns");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, path.string() + ":" + std::to_string(lineno)));
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return t;
}

void write_posterior_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                         const GaussianVariational& q) {
  if (static_cast<int>(names.size()) != q.dim()) throw ConfigError("parameter names do not match posterior");
  std::ofstream out = open_out(path);
  out << "param,mean,sd";
  for (const auto& n : names) out << ",cov:" << n;
  out << '\n';
  const Eigen::MatrixXd S = q.sigma();
  for (int i = 0; i < q.dim(); ++i) {
    out << names[static_cast<std::size_t>(i)] << ',' << format_double(q.mu[i]) << ',' << format_double(std::sqrt(S(i, i)));
    for (int j = 0; j < q.dim(); ++j) out << ',' << format_double(S(i, j));
    out << '\n';
  }
}

PosteriorCsv read_posterior_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header");
  const auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "param" || header[1] != "mean" || header[2] != "sd")
    throw ParseError(path.string(), 1, "expected header param,mean,sd,cov:...");
  const std::size_t p = header.size() - 3;
  PosteriorCsv pc;
  Eigen::VectorXd mu(static_cast<Eigen::Index>(p));
  Eigen::MatrixXd S(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    const long lineno = static_cast<long>(i) + 2;
    if (!std::getline(in, line)) throw ParseError(path.string(), lineno, "missing parameter row");
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw ParseError(path.string(), lineno, "wrong number of columns");
    pc.names.push_back(cells[0]);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    mu[static_cast<Eigen::Index>(i)] = parse_double(cells[1], where);
    for (std::size_t j = 0; j < p; ++j)
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(cells[3 + j], where);
  }
  pc.q = GaussianVariational::from_covariance(mu, S);
  return pc;
}

void save_adjusted_pl(const std::filesystem::path& path, const AdjustedPL& a) {
  json j;
  j["kind"] = "adjusted-pseudolikelihood";
  j["spec"] = a.spec;
  j["network_hash"] = hex64(a.network_hash);
  j["seed"] = a.seed;
  j["theta_pl"] = vec_json(a.theta_pl);
  j["theta_ml"] = vec_json(a.theta_ml);
  j["W"] = mat_json(a.W);
  j["log_M"] = a.log_M;
  j["log_z_ml"] = a.log_z_ml;
  j["cov_ml"] = mat_json(a.cov_ml);
  j["s_obs"] = vec_json(a.s_obs);
  j["y"] = vec_json(a.y);
  j["alpha"] = vec_json(a.alpha);
  j["beta"] = mat_json(a.beta);
  std::ofstream out = open_out(path);
  out << j.dump(1) << '\n';
}

AdjustedPL load_adjusted_pl(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    if (j.at("kind") != "adjusted-pseudolikelihood") throw IoError(path.string() + ": not an adjustment cache");
    AdjustedPL a;
    a.spec = j.at("spec").get<std::string>();
    a.network_hash = std::stoull(j.at("network_hash").get<std::string>(), nullptr, 16);
    a.seed = j.at("seed").get<std::uint64_t>();
    a.theta_pl = json_vec(j.at("theta_pl"));
    a.theta_ml = json_vec(j.at("theta_ml"));
    const Eigen::Index p = a.theta_ml.size();
    a.W = json_mat(j.at("W"), p);
    a.log_M = j.at("log_M").get<double>();
    a.log_z_ml = j.at("log_z_ml").get<double>();
    a.cov_ml = json_mat(j.at("cov_ml"), p);
    a.s_obs = json_vec(j.at("s_obs"));
    a.y = json_vec(j.at("y"));
    a.alpha = json_vec(j.at("alpha"));
    a.beta = json_mat(j.at("beta"), p);
    if (a.alpha.size() != a.y.size() || a.beta.rows() != a.y.size()) throw IoError(path.string() + ": dyad arrays disagree");
    return a;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_elbo_reference(const std::filesystem::path& path, const ElboReference& ref) {
  json j;
  j["kind"] = "elbo-reference";
  j["theta_ml"] = vec_json(ref.theta_ml);
  j["log_z_ml"] = ref.log_z_ml;
  j["s_obs"] = vec_json(ref.s_obs);
  j["stats0"] = mat_json(ref.stats0);
  std::ofstream out = open_out(path);
  out << j.dump(1) << '\n';
}

ElboReference load_elbo_reference(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    if (j.at("kind") != "elbo-reference") throw IoError(path.string() + ": not an ELBO reference file");
    ElboReference r;
    r.theta_ml = json_vec(j.at("theta_ml"));
    r.log_z_ml = j.at("log_z_ml").get<double>();
    r.s_obs = json_vec(j.at("s_obs"));
    r.stats0 = json_mat(j.at("stats0"), r.theta_ml.size());
    return r;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return hex64(h);
}

}  // namespace vergm
