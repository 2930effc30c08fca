#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgm/types.hpp"

namespace sgm {

// Numeric matrix, rows = observations. A non-numeric first row is treated as a
// header and skipped. Errors carry the 1-based line (and column) of the offense;
// NaN/Inf cells are rejected.
Dataset load_csv(const std::string& path);

// 17-significant-digit serialization: save -> load round-trips exactly.
// Column names are optional; none are written by default.
void save_csv(const std::string& path, const Dataset& data,
              const std::vector<std::string>& col_names = {});

// Edge lists are "i,j" rows, 0-based, i < j, with a header line.
void save_edge_list(const std::string& path, const Graph& g);
Graph load_edge_list(const std::string& path, int p);

// Selection-frequency matrix as "i,j,frequency" rows over all pairs i < j.
void save_frequency_matrix(const std::string& path, const Eigen::MatrixXd& freq);
Eigen::MatrixXd load_frequency_matrix(const std::string& path, int p);

}  // namespace sgm
