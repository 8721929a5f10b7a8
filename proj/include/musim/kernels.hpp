#pragma once

namespace musim::kernels {

// Every kernel has a plain serial implementation (the reference) and an
// OpenMP variant. The parallel variants split work so that each output
// element is produced by exactly one iteration with the same summation
// order as the serial code, so results are bit-identical for any thread
// count. Batch index is always the serial (innermost reduction) axis.
enum class Exec { Serial, Parallel };

Exec default_exec();
void set_default_exec(Exec e);

// Y[m x n] = X[m x k] * W^T + b, with W[n x k] row-major and b[n].
void dense_forward(int m, int k, int n, const double* X, const double* W, const double* b,
                   double* Y, Exec exec = default_exec());

// dX[m x k] = dY[m x n] * W[n x k]
void matmul_nn(int m, int n, int k, const double* dY, const double* W, double* dX,
               Exec exec = default_exec());

// dW[n x k] = dY^T[n x m] * X[m x k]  (sum over the batch)
void grad_weights(int m, int k, int n, const double* dY, const double* X, double* dW,
                  Exec exec = default_exec());

// db[n] = column sums of dY[m x n]
void col_sums(int m, int n, const double* dY, double* db, Exec exec = default_exec());

}  // namespace musim::kernels
