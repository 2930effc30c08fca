#pragma once

#include <Eigen/Dense>

#include "sgm/types.hpp"

namespace sgm {

// log of the normalizing constant 2*Gamma((nu+1)/nu) of the standard density exp(-|x|^nu).
double log_normalizing_constant(ShapeParam nu);

// log density of the standard (location 0, scale 1) distribution with tail exponent nu.
double univariate_log_density(double x, ShapeParam nu);

// Variance Gamma(3/nu)/Gamma(1/nu) of the standard distribution (0.5 at nu=2).
double standard_subbotin_variance(ShapeParam nu);

// Location and scale of node i's conditional given the rest of x.
double conditional_location(const ParamMatrix& theta, int i, const Eigen::VectorXd& x);
double conditional_scale(const ParamMatrix& theta, int i);

// i-th summand of the joint energy Q(x); uses only the prefix x_0..x_{i-1}
// (the natural column order is part of the model definition, see ParamMatrix).
double q_component(const ParamMatrix& theta, int i, const Eigen::VectorXd& x, ShapeParam nu);

// Q(x) = sum of the components; the joint density is exp(Q(x)) / normalizer. Q(0) = 0.
double log_unnormalized_density(const ParamMatrix& theta, const Eigen::VectorXd& x, ShapeParam nu);

// exp(Q) integrates to a finite constant iff the stored matrix is positive
// definite; certified as: smallest eigenvalue > 1e-10 * largest diagonal entry.
bool check_normalizable(const ParamMatrix& theta);

// Inverse covariance implied by theta: (Gamma(1/nu)/Gamma(3/nu)) * theta.
// Exact for nu=2 with unit diagonal; a tail-matched approximation otherwise.
Eigen::MatrixXd precision_from_theta(const ParamMatrix& theta, ShapeParam nu);

// Column-wise (x - mean)/sd with the n-1 sd. Degenerate columns are an error
// naming the column. Requires at least two rows.
Dataset standardize(const Dataset& data);

}  // namespace sgm
