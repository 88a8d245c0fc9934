#include "mvpareto/extremes.hpp"
#include "mvpareto/portfolio.hpp"
#include "mvpareto/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

namespace mp = mvpareto;

namespace {

double best_seconds(const std::function<void()>& fn, int repeats) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        if (elapsed.count() < best) best = elapsed.count();
    }
    return best;
}

void report(const std::string& name, double serial, double parallel) {
    std::printf("%-34s serial %9.4f s  parallel %9.4f s  speedup %5.2fx\n", name.c_str(), serial,
                parallel, serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t m = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1'000'000;
    const int repeats = 3;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("threads: %d, replicates: %zu\n", threads, m);

    const auto case3 = mp::ExposurePortfolio::build(
        std::vector<std::vector<int>>{{1, 1, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}},
        std::vector<double>(3, 122.39), std::vector<double>(4, 1.67));
    const auto wide = mp::ExposurePortfolio::preset(mp::Preset::example_1_3, 8, std::vector<double>(8, 1.0),
                                                 std::vector<double>(9, 0.8));
    volatile double sink = 0.0;

    report("background_risk n=3",
           best_seconds([&] { sink = sink + mp::sim::sample_background_risk_serial(case3, m, 7).draws[0]; }, repeats),
           best_seconds([&] { sink = sink + mp::sim::sample_background_risk(case3, m, 7).draws[0]; }, repeats));
    report("common_shock n=3",
           best_seconds([&] { sink = sink + mp::sim::sample_common_shock_serial(case3, m, 7).draws[0]; }, repeats),
           best_seconds([&] { sink = sink + mp::sim::sample_common_shock(case3, m, 7).draws[0]; }, repeats));
    report("common_shock n=8",
           best_seconds([&] { sink = sink + mp::sim::sample_common_shock_serial(wide, m / 4, 7).draws[0]; }, repeats),
           best_seconds([&] { sink = sink + mp::sim::sample_common_shock(wide, m / 4, 7).draws[0]; }, repeats));

    for (std::size_t n : {10u, 14u}) {
        const auto p = mp::ExposurePortfolio::preset(mp::Preset::flexible_II, n, std::vector<double>(n, 1.0),
                                                    std::vector<double>(n + 1, 0.7));
        report("maxima law build n=" + std::to_string(n),
               best_seconds([&] { sink = sink + mp::extremes::MaximaLaw::build_serial(p).ddf(1.0); }, repeats),
               best_seconds([&] { sink = sink + mp::extremes::MaximaLaw(p).ddf(1.0); }, repeats));
    }
    return 0;
}
