#pragma once

#include <Eigen/Dense>

#include "rescount/common.hpp"

namespace rescount {

// Thin wrappers around LAPACKE on column-major Eigen storage.

// Eigenvalues of a general complex matrix (zgeev, no vectors).
Eigen::VectorXcd eigenvalues_dense(const Eigen::MatrixXcd& M);

// Singular values, descending (zgesdd).
Eigen::VectorXd singular_values_dense(const Eigen::MatrixXcd& M);

// Eigenvalues of the rank-m orthogonal compression of M obtained from a
// randomized range sketch with one power iteration: Q = orth(M (M Omega)),
// returns eig(Q^* M Q). Deterministic for fixed seed. Captures every
// eigenvalue of modulus well above s_{m+1}(M); the far tail is truncated.
Eigen::VectorXcd eigenvalues_compressed(const Eigen::MatrixXcd& M, int m, unsigned seed);

// Set BLAS thread count (no-op if the symbol is unavailable).
void set_blas_threads(int n);

}  // namespace rescount
