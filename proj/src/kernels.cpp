#include "musim/kernels.hpp"

#include <atomic>

namespace musim::kernels {

namespace {
std::atomic<Exec> g_default{Exec::Parallel};
}

Exec default_exec() { return g_default.load(std::memory_order_relaxed); }
void set_default_exec(Exec e) { g_default.store(e, std::memory_order_relaxed); }

namespace {

void dense_forward_serial(int m, int k, int n, const double* X, const double* W,
                          const double* b, double* Y) {
  for (int i = 0; i < m; ++i) {
    const double* x = X + static_cast<long>(i) * k;
    double* y = Y + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* w = W + static_cast<long>(j) * k;
      double acc = b[j];
      for (int t = 0; t < k; ++t) acc += x[t] * w[t];
      y[j] = acc;
    }
  }
}

void dense_forward_parallel(int m, int k, int n, const double* X, const double* W,
                            const double* b, double* Y) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* x = X + static_cast<long>(i) * k;
      const double* w = W + static_cast<long>(j) * k;
      double acc = b[j];
      for (int t = 0; t < k; ++t) acc += x[t] * w[t];
      Y[static_cast<long>(i) * n + j] = acc;
    }
  }
}

void matmul_nn_serial(int m, int n, int k, const double* dY, const double* W, double* dX) {
  for (int i = 0; i < m; ++i) {
    const double* dy = dY + static_cast<long>(i) * n;
    double* dx = dX + static_cast<long>(i) * k;
    for (int t = 0; t < k; ++t) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += dy[j] * W[static_cast<long>(j) * k + t];
      dx[t] = acc;
    }
  }
}

void matmul_nn_parallel(int m, int n, int k, const double* dY, const double* W, double* dX) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < m; ++i) {
    for (int t = 0; t < k; ++t) {
      const double* dy = dY + static_cast<long>(i) * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += dy[j] * W[static_cast<long>(j) * k + t];
      dX[static_cast<long>(i) * k + t] = acc;
    }
  }
}

void grad_weights_serial(int m, int k, int n, const double* dY, const double* X, double* dW) {
  for (int j = 0; j < n; ++j) {
    double* dw = dW + static_cast<long>(j) * k;
    for (int t = 0; t < k; ++t) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        acc += dY[static_cast<long>(i) * n + j] * X[static_cast<long>(i) * k + t];
      }
      dw[t] = acc;
    }
  }
}

void grad_weights_parallel(int m, int k, int n, const double* dY, const double* X, double* dW) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int j = 0; j < n; ++j) {
    for (int t = 0; t < k; ++t) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        acc += dY[static_cast<long>(i) * n + j] * X[static_cast<long>(i) * k + t];
      }
      dW[static_cast<long>(j) * k + t] = acc;
    }
  }
}

void col_sums_serial(int m, int n, const double* dY, double* db) {
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += dY[static_cast<long>(i) * n + j];
    db[j] = acc;
  }
}

void col_sums_parallel(int m, int n, const double* dY, double* db) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += dY[static_cast<long>(i) * n + j];
    db[j] = acc;
  }
}

}  // namespace

void dense_forward(int m, int k, int n, const double* X, const double* W, const double* b,
                   double* Y, Exec exec) {
  if (exec == Exec::Serial) {
    dense_forward_serial(m, k, n, X, W, b, Y);
  } else {
    dense_forward_parallel(m, k, n, X, W, b, Y);
  }
}

void matmul_nn(int m, int n, int k, const double* dY, const double* W, double* dX, Exec exec) {
  if (exec == Exec::Serial) {
    matmul_nn_serial(m, n, k, dY, W, dX);
  } else {
    matmul_nn_parallel(m, n, k, dY, W, dX);
  }
}

void grad_weights(int m, int k, int n, const double* dY, const double* X, double* dW,
                  Exec exec) {
  if (exec == Exec::Serial) {
    grad_weights_serial(m, k, n, dY, X, dW);
  } else {
    grad_weights_parallel(m, k, n, dY, X, dW);
  }
}

void col_sums(int m, int n, const double* dY, double* db, Exec exec) {
  if (exec == Exec::Serial) {
    col_sums_serial(m, n, dY, db);
  } else {
    col_sums_parallel(m, n, dY, db);
  }
}

}  // namespace musim::kernels
