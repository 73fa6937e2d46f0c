// Times the serial reference kernels against their OpenMP variants.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gsum/kernels.hpp"

using namespace gsum;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto start = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto stop = Clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

std::vector<double> random_values(std::mt19937_64& rng, size_t n) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = unif(rng);
    return out;
}

void bench_matmul(int dim, int reps) {
    std::mt19937_64 rng(42);
    const auto a = random_values(rng, static_cast<size_t>(dim) * dim);
    const auto b = random_values(rng, static_cast<size_t>(dim) * dim);
    std::vector<double> y(static_cast<size_t>(dim) * dim);
    const double serial = time_ms(
        [&] { kernels::matmul_serial(a.data(), b.data(), y.data(), dim, dim, dim); }, reps);
    const double omp = time_ms(
        [&] { kernels::matmul_omp(a.data(), b.data(), y.data(), dim, dim, dim); }, reps);
    std::printf("matmul      %5dx%-5d serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n",
                dim, dim, serial, omp, serial / omp);
}

void bench_softmax(int rows, int cols, int reps) {
    std::mt19937_64 rng(43);
    const auto x = random_values(rng, static_cast<size_t>(rows) * cols);
    std::vector<double> y(x.size());
    const double serial = time_ms(
        [&] { kernels::softmax_rows_serial(x.data(), y.data(), rows, cols); }, reps);
    const double omp =
        time_ms([&] { kernels::softmax_rows_omp(x.data(), y.data(), rows, cols); }, reps);
    std::printf("softmax     %5dx%-5d serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n",
                rows, cols, serial, omp, serial / omp);
}

void bench_layer_norm(int rows, int cols, int reps) {
    std::mt19937_64 rng(44);
    const auto x = random_values(rng, static_cast<size_t>(rows) * cols);
    const auto gain = random_values(rng, static_cast<size_t>(cols));
    const auto bias = random_values(rng, static_cast<size_t>(cols));
    std::vector<double> y(x.size()), mean(rows), rstd(rows);
    const double serial = time_ms(
        [&] {
            kernels::layer_norm_rows_serial(x.data(), gain.data(), bias.data(), 1e-6,
                                            y.data(), mean.data(), rstd.data(), rows, cols);
        },
        reps);
    const double omp = time_ms(
        [&] {
            kernels::layer_norm_rows_omp(x.data(), gain.data(), bias.data(), 1e-6, y.data(),
                                         mean.data(), rstd.data(), rows, cols);
        },
        reps);
    std::printf("layer_norm  %5dx%-5d serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n",
                rows, cols, serial, omp, serial / omp);
}

}  // namespace

int main(int argc, char** argv) {
    int reps = 5;
    if (argc > 1) reps = std::max(1, std::atoi(argv[1]));
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; omp variants run serially\n");
#endif
    for (int dim : {64, 128, 256, 512}) bench_matmul(dim, reps);
    for (int rows : {256, 2048, 16384}) bench_softmax(rows, 128, reps);
    for (int rows : {256, 2048, 16384}) bench_layer_norm(rows, 128, reps);
    return 0;
}
