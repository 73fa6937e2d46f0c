#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gsum/kernels.hpp"

using namespace gsum;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, size_t n) {
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<double> out(n);
    for (auto& v : out) v = unif(rng);
    return out;
}

}  // namespace

TEST_CASE("matmul matches a naive triple loop") {
    std::mt19937_64 rng(5);
    const int m = 3, k = 4, n = 2;
    const auto a = random_values(rng, m * k);
    const auto b = random_values(rng, k * n);
    std::vector<double> got(m * n);
    kernels::matmul(a.data(), b.data(), got.data(), m, k, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            double want = 0.0;
            for (int p = 0; p < k; ++p) want += a[i * k + p] * b[p * n + j];
            CHECK(got[i * n + j] == doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("matmul_nt and matmul_tn match explicit transposition") {
    std::mt19937_64 rng(6);
    const int m = 5, k = 3, n = 4;
    const auto a = random_values(rng, m * k);   // m x k
    const auto bt = random_values(rng, n * k);  // n x k, used as b^T
    std::vector<double> got(m * n), want(m * n);
    kernels::matmul_nt(a.data(), bt.data(), got.data(), m, k, n);
    std::vector<double> b(k * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) b[j * n + i] = bt[i * k + j];
    kernels::matmul(a.data(), b.data(), want.data(), m, k, n);
    for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));

    const auto at = random_values(rng, k * m);  // k x m, used as a^T
    std::vector<double> got2(m * n), a2(m * k);
    const auto b2 = random_values(rng, k * n);
    kernels::matmul_tn(at.data(), b2.data(), got2.data(), m, k, n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) a2[j * k + i] = at[i * m + j];
    std::vector<double> want2(m * n);
    kernels::matmul(a2.data(), b2.data(), want2.data(), m, k, n);
    for (size_t i = 0; i < got2.size(); ++i) CHECK(got2[i] == doctest::Approx(want2[i]));
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    std::mt19937_64 rng(7);
    // Sizes straddling the parallel grain.
    for (const int dim : {8, 48, 96}) {
        const int m = dim, k = dim + 3, n = dim - 1;
        const auto a = random_values(rng, static_cast<size_t>(m) * k);
        const auto b = random_values(rng, static_cast<size_t>(k) * n);
        const auto bt = random_values(rng, static_cast<size_t>(n) * k);
        const auto at = random_values(rng, static_cast<size_t>(k) * m);
        std::vector<double> serial(static_cast<size_t>(m) * n), omp(serial.size());

        kernels::matmul_serial(a.data(), b.data(), serial.data(), m, k, n);
        kernels::matmul_omp(a.data(), b.data(), omp.data(), m, k, n);
        CHECK(serial == omp);

        kernels::matmul_nt_serial(a.data(), bt.data(), serial.data(), m, k, n);
        kernels::matmul_nt_omp(a.data(), bt.data(), omp.data(), m, k, n);
        CHECK(serial == omp);

        kernels::matmul_tn_serial(at.data(), b.data(), serial.data(), m, k, n);
        kernels::matmul_tn_omp(at.data(), b.data(), omp.data(), m, k, n);
        CHECK(serial == omp);

        const auto x = random_values(rng, static_cast<size_t>(m) * n);
        kernels::softmax_rows_serial(x.data(), serial.data(), m, n);
        kernels::softmax_rows_omp(x.data(), omp.data(), m, n);
        CHECK(serial == omp);

        const auto gain = random_values(rng, static_cast<size_t>(n));
        const auto bias = random_values(rng, static_cast<size_t>(n));
        std::vector<double> mean_s(m), rstd_s(m), mean_p(m), rstd_p(m);
        kernels::layer_norm_rows_serial(x.data(), gain.data(), bias.data(), 1e-6,
                                        serial.data(), mean_s.data(), rstd_s.data(), m, n);
        kernels::layer_norm_rows_omp(x.data(), gain.data(), bias.data(), 1e-6, omp.data(),
                                     mean_p.data(), rstd_p.data(), m, n);
        CHECK(serial == omp);
        CHECK(mean_s == mean_p);
        CHECK(rstd_s == rstd_p);

        const auto y0 = random_values(rng, x.size());
        std::vector<double> ys = y0, yp = y0;
        kernels::axpy_serial(x.data(), 0.37, ys.data(), x.size());
        kernels::axpy_omp(x.data(), 0.37, yp.data(), x.size());
        CHECK(ys == yp);

        kernels::add_serial(x.data(), y0.data(), serial.data(), x.size());
        kernels::add_omp(x.data(), y0.data(), omp.data(), x.size());
        CHECK(serial == omp);

        kernels::relu_serial(x.data(), serial.data(), x.size());
        kernels::relu_omp(x.data(), omp.data(), x.size());
        CHECK(serial == omp);

        kernels::scale_serial(x.data(), -1.25, serial.data(), x.size());
        kernels::scale_omp(x.data(), -1.25, omp.data(), x.size());
        CHECK(serial == omp);
    }
}

TEST_CASE("dispatch honors the parallel switch") {
    const bool was = kernels::parallel_enabled();
    kernels::set_parallel(false);
    CHECK(!kernels::parallel_enabled());
    std::mt19937_64 rng(9);
    const int m = 64, k = 64, n = 64;
    const auto a = random_values(rng, static_cast<size_t>(m) * k);
    const auto b = random_values(rng, static_cast<size_t>(k) * n);
    std::vector<double> off(static_cast<size_t>(m) * n), on(off.size());
    kernels::matmul(a.data(), b.data(), off.data(), m, k, n);
    kernels::set_parallel(true);
    kernels::matmul(a.data(), b.data(), on.data(), m, k, n);
    CHECK(off == on);
    kernels::set_parallel(was);
}

TEST_CASE("softmax rows sum to one") {
    std::mt19937_64 rng(10);
    const int m = 7, n = 13;
    const auto x = random_values(rng, static_cast<size_t>(m) * n);
    std::vector<double> y(x.size());
    kernels::softmax_rows(x.data(), y.data(), m, n);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += y[static_cast<size_t>(i) * n + j];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("accumulate mode adds on top") {
    std::mt19937_64 rng(11);
    const int m = 4, k = 5, n = 6;
    const auto a = random_values(rng, static_cast<size_t>(m) * k);
    const auto b = random_values(rng, static_cast<size_t>(k) * n);
    std::vector<double> once(static_cast<size_t>(m) * n, 0.0);
    kernels::matmul(a.data(), b.data(), once.data(), m, k, n);
    std::vector<double> twice = once;
    kernels::matmul(a.data(), b.data(), twice.data(), m, k, n, true);
    for (size_t i = 0; i < once.size(); ++i)
        CHECK(twice[i] == doctest::Approx(2.0 * once[i]));
}
