// Times the OpenMP kernels against their serial twins on representative
// sizes and prints the speedup. The serial paths are the reference
// implementations the tests compare against bitwise.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "whcn/geom_features.hpp"
#include "whcn/matrix.hpp"
#include "whcn/point_graph.hpp"
#include "whcn/rng.hpp"
#include "whcn/whcn_model.hpp"

#include "../tests/helpers.hpp"

using namespace whcn;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    Rng rng(1);

    {
        const std::size_t n = 384;
        Matrix a(n, n), b(n, n);
        for (auto& v : a.data()) v = rng.uniform(-1, 1);
        for (auto& v : b.data()) v = rng.uniform(-1, 1);
        row("matmul 384x384",
            time_ms([&] { matmul(a, b, Exec::Serial); }, 3),
            time_ms([&] { matmul(a, b, Exec::Parallel); }, 3));
    }

    {
        std::vector<Vec3> pts(4000);
        for (auto& p : pts)
            p = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        row("knn_graph n=4000 K=10",
            time_ms([&] { knn_graph(pts, 10, Exec::Serial); }, 3),
            time_ms([&] { knn_graph(pts, 10, Exec::Parallel); }, 3));

        PointGraph g = knn_graph(pts, 10);
        row("geom features n=4000",
            time_ms([&] { geometric_features(pts, g, Exec::Serial); }, 3),
            time_ms([&] { geometric_features(pts, g, Exec::Parallel); }, 3));
    }

    {
        Rng hg_rng(7);
        Hypergraph hg = testutil::random_hypergraph(hg_rng, 400, 400);
        Matrix x(hg.n_vertices, 16);
        for (auto& v : x.data()) v = hg_rng.uniform(-1, 1);
        Matrix theta(16, 32);
        for (auto& v : theta.data()) v = hg_rng.uniform(-1, 1);
        Matrix att(1, 64);
        for (auto& v : att.data()) v = hg_rng.uniform(-0.05, 0.05);

        row("attention N=400",
            time_ms([&] { hyperedge_attention_weights(x, theta, att, hg, 1.0, 0.01,
                                                      Exec::Serial); }, 5),
            time_ms([&] { hyperedge_attention_weights(x, theta, att, hg, 1.0, 0.01,
                                                      Exec::Parallel); }, 5));

        row("whcn layer N=400",
            time_ms([&] { whcn_layer(x, hg, theta, Activation::ReLU, Exec::Serial); }, 5),
            time_ms([&] { whcn_layer(x, hg, theta, Activation::ReLU, Exec::Parallel); },
                    5));
    }
    return 0;
}
