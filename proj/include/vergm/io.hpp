#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "vergm/gaussian.hpp"
#include "vergm/pseudo.hpp"
#include "vergm/svi.hpp"

namespace vergm {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text, const std::string& where);

struct TableCsv {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Header row plus one row per matrix row.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& values);
TableCsv read_table_csv(const std::filesystem::path& path);

struct PosteriorCsv {
  std::vector<std::string> names;
  GaussianVariational q;
};

/// Columns param, mean, sd, cov:<name>... ; one row per parameter.
void write_posterior_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                         const GaussianVariational& q);
PosteriorCsv read_posterior_csv(const std::filesystem::path& path);

void save_adjusted_pl(const std::filesystem::path& path, const AdjustedPL& apl);
AdjustedPL load_adjusted_pl(const std::filesystem::path& path);

void save_elbo_reference(const std::filesystem::path& path, const ElboReference& ref);
ElboReference load_elbo_reference(const std::filesystem::path& path);

/// 64-bit FNV-1a of the file bytes as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace vergm
