#pragma once

#include <cstddef>

// Dense f64 kernels backing the tensor ops. Every kernel has a serial
// reference implementation and an OpenMP variant that partitions work by
// output element, so both produce bit-identical results for any thread
// count. The dispatching entry points pick the OpenMP path only when it is
// enabled and the problem is large enough to amortize the fork.
namespace gsum::kernels {

bool parallel_enabled();
void set_parallel(bool enabled);

// Work threshold (in flops or touched elements) below which the
// dispatchers stay serial. Forking a team costs tens of microseconds on a
// small box, so only matmuls of roughly 128^3 and up go wide; the toy
// models' per-op work sits far below this and runs serial while the
// example-level fan-out in evaluation parallelizes above it.
inline constexpr long long kParallelGrain = 1LL << 21;

// y(m x n) = a(m x k) * b(k x n); accumulate adds into y instead.
void matmul(const double* a, const double* b, double* y, int m, int k, int n,
            bool accumulate = false);
void matmul_serial(const double* a, const double* b, double* y, int m, int k, int n,
                   bool accumulate = false);
void matmul_omp(const double* a, const double* b, double* y, int m, int k, int n,
                bool accumulate = false);

// y(m x n) = a(m x k) * b(n x k)^T
void matmul_nt(const double* a, const double* b, double* y, int m, int k, int n,
               bool accumulate = false);
void matmul_nt_serial(const double* a, const double* b, double* y, int m, int k, int n,
                      bool accumulate = false);
void matmul_nt_omp(const double* a, const double* b, double* y, int m, int k, int n,
                   bool accumulate = false);

// y(m x n) = a(k x m)^T * b(k x n)
void matmul_tn(const double* a, const double* b, double* y, int m, int k, int n,
               bool accumulate = false);
void matmul_tn_serial(const double* a, const double* b, double* y, int m, int k, int n,
                      bool accumulate = false);
void matmul_tn_omp(const double* a, const double* b, double* y, int m, int k, int n,
                   bool accumulate = false);

// Row-wise max-subtracted softmax.
void softmax_rows(const double* x, double* y, int rows, int cols);
void softmax_rows_serial(const double* x, double* y, int rows, int cols);
void softmax_rows_omp(const double* x, double* y, int rows, int cols);

// Row-wise layer normalization. mean/rstd (length rows) capture the
// per-row statistics needed by the backward pass; either may be null.
void layer_norm_rows(const double* x, const double* gain, const double* bias, double eps,
                     double* y, double* mean, double* rstd, int rows, int cols);
void layer_norm_rows_serial(const double* x, const double* gain, const double* bias,
                            double eps, double* y, double* mean, double* rstd, int rows,
                            int cols);
void layer_norm_rows_omp(const double* x, const double* gain, const double* bias, double eps,
                         double* y, double* mean, double* rstd, int rows, int cols);

// Elementwise.
void add(const double* a, const double* b, double* y, size_t n);
void add_serial(const double* a, const double* b, double* y, size_t n);
void add_omp(const double* a, const double* b, double* y, size_t n);

void scale(const double* a, double c, double* y, size_t n);
void scale_serial(const double* a, double c, double* y, size_t n);
void scale_omp(const double* a, double c, double* y, size_t n);

void relu(const double* a, double* y, size_t n);
void relu_serial(const double* a, double* y, size_t n);
void relu_omp(const double* a, double* y, size_t n);

// y += c * a
void axpy(const double* a, double c, double* y, size_t n);
void axpy_serial(const double* a, double c, double* y, size_t n);
void axpy_omp(const double* a, double c, double* y, size_t n);

}  // namespace gsum::kernels
