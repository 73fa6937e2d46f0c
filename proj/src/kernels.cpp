#include "gsum/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gsum::kernels {

namespace {
std::atomic<bool> g_parallel{true};

inline bool go_parallel(long long work) {
#ifdef _OPENMP
    return g_parallel.load(std::memory_order_relaxed) && work >= kParallelGrain;
#else
    (void)work;
    return false;
#endif
}
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool enabled) { g_parallel.store(enabled, std::memory_order_relaxed); }

// ---------------------------------------------------------------------------
// matmul: y = a(m x k) * b(k x n). ikj loop order keeps b row-sequential.
// The OpenMP variants split by output row; each row's accumulation order is
// identical to the serial code.

namespace {
inline void matmul_row(const double* a, const double* b, double* y, int k, int n, int i,
                       bool accumulate) {
    double* yr = y + static_cast<size_t>(i) * n;
    if (!accumulate) std::memset(yr, 0, sizeof(double) * n);
    const double* ar = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
        const double av = ar[p];
        const double* br = b + static_cast<size_t>(p) * n;
        for (int j = 0; j < n; ++j) yr[j] += av * br[j];
    }
}

inline void matmul_nt_row(const double* a, const double* b, double* y, int k, int n, int i,
                          bool accumulate) {
    const double* ar = a + static_cast<size_t>(i) * k;
    double* yr = y + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
        const double* br = b + static_cast<size_t>(j) * k;
        double acc = 0.0;
        for (int p = 0; p < k; ++p) acc += ar[p] * br[p];
        yr[j] = accumulate ? yr[j] + acc : acc;
    }
}

// Block of output rows [i0, i1) with the k loop outermost: reads of both a
// and b stay row-sequential, and each output element accumulates in the
// same k order for any blocking, so serial and OpenMP agree bitwise.
inline void matmul_tn_block(const double* a, const double* b, double* y, int m, int k, int n,
                            int i0, int i1, bool accumulate) {
    if (!accumulate)
        std::memset(y + static_cast<size_t>(i0) * n, 0,
                    sizeof(double) * static_cast<size_t>(i1 - i0) * n);
    for (int p = 0; p < k; ++p) {
        const double* ar = a + static_cast<size_t>(p) * m;
        const double* br = b + static_cast<size_t>(p) * n;
        for (int i = i0; i < i1; ++i) {
            const double av = ar[i];
            double* yr = y + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) yr[j] += av * br[j];
        }
    }
}
}  // namespace

void matmul_serial(const double* a, const double* b, double* y, int m, int k, int n,
                   bool accumulate) {
    for (int i = 0; i < m; ++i) matmul_row(a, b, y, k, n, i, accumulate);
}

void matmul_omp(const double* a, const double* b, double* y, int m, int k, int n,
                bool accumulate) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) matmul_row(a, b, y, k, n, i, accumulate);
}

void matmul(const double* a, const double* b, double* y, int m, int k, int n,
            bool accumulate) {
    if (go_parallel(static_cast<long long>(m) * k * n))
        matmul_omp(a, b, y, m, k, n, accumulate);
    else
        matmul_serial(a, b, y, m, k, n, accumulate);
}

void matmul_nt_serial(const double* a, const double* b, double* y, int m, int k, int n,
                      bool accumulate) {
    for (int i = 0; i < m; ++i) matmul_nt_row(a, b, y, k, n, i, accumulate);
}

void matmul_nt_omp(const double* a, const double* b, double* y, int m, int k, int n,
                   bool accumulate) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) matmul_nt_row(a, b, y, k, n, i, accumulate);
}

void matmul_nt(const double* a, const double* b, double* y, int m, int k, int n,
               bool accumulate) {
    if (go_parallel(static_cast<long long>(m) * k * n))
        matmul_nt_omp(a, b, y, m, k, n, accumulate);
    else
        matmul_nt_serial(a, b, y, m, k, n, accumulate);
}

void matmul_tn_serial(const double* a, const double* b, double* y, int m, int k, int n,
                      bool accumulate) {
    matmul_tn_block(a, b, y, m, k, n, 0, m, accumulate);
}

void matmul_tn_omp(const double* a, const double* b, double* y, int m, int k, int n,
                   bool accumulate) {
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    const int block = (m + threads - 1) / threads;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < threads; ++t) {
        const int i0 = t * block;
        const int i1 = i0 + block < m ? i0 + block : m;
        if (i0 < i1) matmul_tn_block(a, b, y, m, k, n, i0, i1, accumulate);
    }
}

void matmul_tn(const double* a, const double* b, double* y, int m, int k, int n,
               bool accumulate) {
    if (go_parallel(static_cast<long long>(m) * k * n))
        matmul_tn_omp(a, b, y, m, k, n, accumulate);
    else
        matmul_tn_serial(a, b, y, m, k, n, accumulate);
}

// ---------------------------------------------------------------------------
// Row-wise kernels.

namespace {
inline void softmax_row(const double* x, double* y, int cols, int r) {
    const double* xr = x + static_cast<size_t>(r) * cols;
    double* yr = y + static_cast<size_t>(r) * cols;
    double mx = xr[0];
    for (int j = 1; j < cols; ++j) mx = xr[j] > mx ? xr[j] : mx;
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
        yr[j] = std::exp(xr[j] - mx);
        sum += yr[j];
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < cols; ++j) yr[j] *= inv;
}

inline void layer_norm_row(const double* x, const double* gain, const double* bias,
                           double eps, double* y, double* mean, double* rstd, int cols,
                           int r) {
    const double* xr = x + static_cast<size_t>(r) * cols;
    double* yr = y + static_cast<size_t>(r) * cols;
    double mu = 0.0;
    for (int j = 0; j < cols; ++j) mu += xr[j];
    mu /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) {
        const double d = xr[j] - mu;
        var += d * d;
    }
    var /= cols;
    const double rs = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < cols; ++j) yr[j] = (xr[j] - mu) * rs * gain[j] + bias[j];
    if (mean) mean[r] = mu;
    if (rstd) rstd[r] = rs;
}
}  // namespace

void softmax_rows_serial(const double* x, double* y, int rows, int cols) {
    for (int r = 0; r < rows; ++r) softmax_row(x, y, cols, r);
}

void softmax_rows_omp(const double* x, double* y, int rows, int cols) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) softmax_row(x, y, cols, r);
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
    if (go_parallel(static_cast<long long>(rows) * cols * 4))
        softmax_rows_omp(x, y, rows, cols);
    else
        softmax_rows_serial(x, y, rows, cols);
}

void layer_norm_rows_serial(const double* x, const double* gain, const double* bias,
                            double eps, double* y, double* mean, double* rstd, int rows,
                            int cols) {
    for (int r = 0; r < rows; ++r) layer_norm_row(x, gain, bias, eps, y, mean, rstd, cols, r);
}

void layer_norm_rows_omp(const double* x, const double* gain, const double* bias, double eps,
                         double* y, double* mean, double* rstd, int rows, int cols) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) layer_norm_row(x, gain, bias, eps, y, mean, rstd, cols, r);
}

void layer_norm_rows(const double* x, const double* gain, const double* bias, double eps,
                     double* y, double* mean, double* rstd, int rows, int cols) {
    if (go_parallel(static_cast<long long>(rows) * cols * 4))
        layer_norm_rows_omp(x, gain, bias, eps, y, mean, rstd, rows, cols);
    else
        layer_norm_rows_serial(x, gain, bias, eps, y, mean, rstd, rows, cols);
}

// ---------------------------------------------------------------------------
// Elementwise kernels.

void add_serial(const double* a, const double* b, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

void add_omp(const double* a, const double* b, double* y, size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] = a[i] + b[i];
}

void add(const double* a, const double* b, double* y, size_t n) {
    if (go_parallel(static_cast<long long>(n)))
        add_omp(a, b, y, n);
    else
        add_serial(a, b, y, n);
}

void scale_serial(const double* a, double c, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = a[i] * c;
}

void scale_omp(const double* a, double c, double* y, size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] = a[i] * c;
}

void scale(const double* a, double c, double* y, size_t n) {
    if (go_parallel(static_cast<long long>(n)))
        scale_omp(a, c, y, n);
    else
        scale_serial(a, c, y, n);
}

void relu_serial(const double* a, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = a[i] > 0.0 ? a[i] : 0.0;
}

void relu_omp(const double* a, double* y, size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] = a[i] > 0.0 ? a[i] : 0.0;
}

void relu(const double* a, double* y, size_t n) {
    if (go_parallel(static_cast<long long>(n)))
        relu_omp(a, y, n);
    else
        relu_serial(a, y, n);
}

void axpy_serial(const double* a, double c, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += c * a[i];
}

void axpy_omp(const double* a, double c, double* y, size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] += c * a[i];
}

void axpy(const double* a, double c, double* y, size_t n) {
    if (go_parallel(static_cast<long long>(n)))
        axpy_omp(a, c, y, n);
    else
        axpy_serial(a, c, y, n);
}

}  // namespace gsum::kernels
