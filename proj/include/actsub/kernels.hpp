#pragma once

// Data-parallel hot loops. Every OpenMP kernel has a serial twin with the same arithmetic
// per output slot; tests hold the two to bitwise agreement and bench/ times them.

#include "actsub/linalg.hpp"
#include "actsub/model.hpp"
#include "actsub/subspace.hpp"

namespace actsub::kernels {

/// D^{1/2} C D^{1/2} with C_jk = exp(-||s_j - s_k||_1 / beta); nodes are rows of a N x 2 matrix.
Matrix weighted_correlation_serial(const Matrix& nodes, const Vector& sqrt_weights, double beta);
Matrix weighted_correlation_parallel(const Matrix& nodes, const Vector& sqrt_weights, double beta);

/// f and grad f at each column of points (m x M).
GradientSampleSet sample_gradients_serial(const ModelFunction& model, const Matrix& points);
GradientSampleSet sample_gradients_parallel(const ModelFunction& model, const Matrix& points);

/// f at each column of points (m x M).
Vector evaluate_values_serial(const ModelFunction& model, const Matrix& points);
Vector evaluate_values_parallel(const ModelFunction& model, const Matrix& points);

/// exp(-sum_i (a_ri - b_si)^2 / (2 l_i^2)) for rows r of a and s of b.
Matrix squared_exponential_gram_serial(const Matrix& a, const Matrix& b, const Vector& lengths);
Matrix squared_exponential_gram_parallel(const Matrix& a, const Matrix& b, const Vector& lengths);

}  // namespace actsub::kernels
