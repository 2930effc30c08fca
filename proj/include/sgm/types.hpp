#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgm {

// All library failures carry a stable machine-readable category (the CLI prints
// "error:<category>: <message>" and exits nonzero).
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error("error:" + category + ": " + message),
        category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

// Tail-shape exponent of the model. Only even integers >= 2 keep the node-wise
// energies polynomial with a well-defined sign structure, so anything else is rejected.
class ShapeParam {
 public:
  explicit ShapeParam(int nu) : nu_(nu) {
    if (nu < 2 || nu % 2 != 0)
      fail("invalid_argument", "shape parameter must be an even integer >= 2, got " + std::to_string(nu));
  }
  int value() const { return nu_; }
  double as_double() const { return static_cast<double>(nu_); }
  friend bool operator==(ShapeParam a, ShapeParam b) { return a.nu_ == b.nu_; }

 private:
  int nu_;
};

// Undirected graph on nodes 0..p-1, no self-loops; edges stored as ordered (i<j) pairs.
class Graph {
 public:
  explicit Graph(int p) : p_(p) {
    if (p < 1) fail("invalid_argument", "graph needs at least one node");
  }

  int nodes() const { return p_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  void add_edge(int i, int j) {
    check_pair(i, j);
    edges_.insert(ordered(i, j));
  }
  void remove_edge(int i, int j) { edges_.erase(ordered(i, j)); }
  bool has_edge(int i, int j) const {
    if (i == j) return false;
    return edges_.count(ordered(i, j)) > 0;
  }

  const std::set<std::pair<int, int>>& edges() const { return edges_; }

  std::vector<int> degrees() const {
    std::vector<int> d(p_, 0);
    for (auto& e : edges_) { ++d[e.first]; ++d[e.second]; }
    return d;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.p_ == b.p_ && a.edges_ == b.edges_;
  }

 private:
  void check_pair(int i, int j) const {
    if (i < 0 || j < 0 || i >= p_ || j >= p_)
      fail("invalid_argument", "edge endpoint out of range");
    if (i == j) fail("invalid_argument", "self-loops are not representable");
  }
  static std::pair<int, int> ordered(int i, int j) {
    return i < j ? std::make_pair(i, j) : std::make_pair(j, i);
  }

  int p_;
  std::set<std::pair<int, int>> edges_;
};

// Observation matrix, rows = samples, cols = variables.
struct Dataset {
  Eigen::MatrixXd values;

  Dataset() = default;
  explicit Dataset(Eigen::MatrixXd v) : values(std::move(v)) {}
  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

// Symmetric interaction matrix of the model, stored in the form whose positive
// definiteness decides normalizability. Convention: the off-diagonal entry is the
// *negative* of the coupling that enters a node's conditional location, so
// coupling(i,j) applies the sign flip. (With unit diagonal and nu=2 the stored
// matrix is half the Gaussian precision.) The natural column order 0..p-1 is the
// ordering used by the joint energy.
class ParamMatrix {
 public:
  explicit ParamMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      fail("invalid_argument", "interaction matrix must be square and non-empty");
    if (!m_.allFinite())
      fail("invalid_argument", "interaction matrix has non-finite entries");
    const double scale = m_.cwiseAbs().maxCoeff();
    for (int i = 0; i < m_.rows(); ++i)
      for (int j = i + 1; j < m_.cols(); ++j)
        if (std::abs(m_(i, j) - m_(j, i)) > 1e-12 * std::max(1.0, scale))
          fail("invalid_argument", "interaction matrix must be symmetric");
    for (int i = 0; i < m_.rows(); ++i)
      if (m_(i, i) <= 0.0)
        fail("invalid_argument", "diagonal of the interaction matrix must be strictly positive");
  }

  int size() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double diag(int i) const { return m_(i, i); }

  // Coupling of node j into node i's conditional location (sign-flipped storage).
  double coupling(int i, int j) const { return i == j ? m_(i, i) : -m_(i, j); }

  Graph support(double tol = 0.0) const {
    Graph g(size());
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j)
        if (std::abs(m_(i, j)) > tol) g.add_edge(i, j);
    return g;
  }

 private:
  Eigen::MatrixXd m_;
};

}  // namespace sgm
