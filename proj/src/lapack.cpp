#include "rescount/lapack.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <random>
#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace rescount {

void set_blas_threads(int n) {
  if (n > 0) openblas_set_num_threads(n);
}

Eigen::VectorXcd eigenvalues_dense(const Eigen::MatrixXcd& M) {
  if (M.rows() != M.cols()) throw error("eigenvalues_dense: matrix not square");
  const lapack_int n = static_cast<lapack_int>(M.rows());
  if (n == 0) return Eigen::VectorXcd();
  Eigen::MatrixXcd A = M;  // zgeev overwrites
  Eigen::VectorXcd w(n);
  lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', n,
      reinterpret_cast<lapack_complex_double*>(A.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) throw error("zgeev failed, info=" + std::to_string(info));
  return w;
}

Eigen::VectorXd singular_values_dense(const Eigen::MatrixXcd& M) {
  const lapack_int m = static_cast<lapack_int>(M.rows());
  const lapack_int n = static_cast<lapack_int>(M.cols());
  if (m == 0 || n == 0) return Eigen::VectorXd();
  Eigen::MatrixXcd A = M;
  Eigen::VectorXd s(std::min(m, n));
  lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'N', m, n,
      reinterpret_cast<lapack_complex_double*>(A.data()), m, s.data(),
      nullptr, 1, nullptr, 1);
  if (info != 0) throw error("zgesdd failed, info=" + std::to_string(info));
  return s;
}

namespace {

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

void zgemm(CBLAS_TRANSPOSE ta, int rows, int cols, int inner, const Eigen::MatrixXcd& A,
           const Eigen::MatrixXcd& B, Eigen::MatrixXcd& C) {
  const cplx one{1.0, 0.0}, zero{0.0, 0.0};
  C.resize(rows, cols);
  cblas_zgemm(CblasColMajor, ta, CblasNoTrans, rows, cols, inner, &one, A.data(),
              static_cast<int>(A.rows()), B.data(), static_cast<int>(B.rows()), &zero, C.data(),
              rows);
}

}  // namespace

Eigen::VectorXcd eigenvalues_compressed(const Eigen::MatrixXcd& M, int m, unsigned seed) {
  const int n = static_cast<int>(M.rows());
  if (M.rows() != M.cols()) throw error("eigenvalues_compressed: matrix not square");
  if (m <= 0) throw error("eigenvalues_compressed: need m > 0");
  if (m >= n) return eigenvalues_dense(M);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd Omega(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) Omega(i, j) = cplx(gauss(rng), gauss(rng));

  // Sketch the dominant column space: Y = M Omega, then Y = Q R. Since the
  // Ritz matrix is consumed only through its eigenvalues, the upper factor R
  // doubles as Q^H (M Omega) and the oblique projection
  //   B = (Q^H M Omega)(Q^H Omega)^{-1} = R G^{-1}
  // approximates Q^H M Q without a second full-size product. Callers must
  // oversample: only eigenvalues well inside the sketch rank are trustworthy.
  Eigen::MatrixXcd Y;
  zgemm(CblasNoTrans, n, m, n, M, Omega, Y);
  Eigen::VectorXcd tau(m);
  if (LAPACKE_zgeqrf(LAPACK_COL_MAJOR, n, m, lp(Y.data()), n, lp(tau.data())) != 0)
    throw error("zgeqrf failed");
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i <= j; ++i) R(i, j) = Y(i, j);
  if (LAPACKE_zungqr(LAPACK_COL_MAJOR, n, m, m, lp(Y.data()), n, lp(tau.data())) != 0)
    throw error("zungqr failed");  // Y now holds Q

  Eigen::MatrixXcd G;
  zgemm(CblasConjTrans, m, m, n, Y, Omega, G);
  // Solve B G = R as G^T B^T = R^T; a degenerate pivot means the sketch lost
  // rank, in which case the exact projection is formed at the cost of one
  // more full-size product.
  Eigen::MatrixXcd Gt = G.transpose();
  Eigen::MatrixXcd Bt = R.transpose();
  std::vector<lapack_int> piv(m);
  bool ok = LAPACKE_zgetrf(LAPACK_COL_MAJOR, m, m, lp(Gt.data()), m, piv.data()) == 0;
  if (ok) {
    double dmin = HUGE_VAL, dmax = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = std::abs(Gt(i, i));
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    ok = dmin > 1e-10 * dmax;
  }
  Eigen::MatrixXcd B;
  if (ok) {
    if (LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', m, m, lp(Gt.data()), m, piv.data(), lp(Bt.data()),
                       m) != 0)
      throw error("zgetrs failed");
    B = Bt.transpose();
  } else {
    Eigen::MatrixXcd MQ;
    zgemm(CblasNoTrans, n, m, n, M, Y, MQ);
    zgemm(CblasConjTrans, m, m, n, Y, MQ, B);
  }
  return eigenvalues_dense(B);
}

}  // namespace rescount
