// Benchmark comparing the OpenMP batch kernels against the serial reference.
#include <chrono>
#include <cstdio>

#include "strat/kernels.hpp"
#include "strat/rng.hpp"

using namespace strat;

namespace {

double time_ms(const std::function<void()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 4000;
    std::printf("threads: %d (openmp %s)\n", max_threads(), openmp_enabled() ? "on" : "off");

    // Whitney umbrella surface as the workload.
    std::vector<std::string> vars{"x", "y", "z"};
    Stratum surface;
    surface.id = "surface";
    surface.carrier = semivariety_from_equations(
        3, {parse_polynomial("x^2 - z*y^2", vars)}, {parse_polynomial("y^2", vars)});
    surface.dim = 2;
    StratumNumerics num(surface);

    Rng rng = Rng::stream(7, {Rng::kTest});
    std::vector<Vec> starts;
    starts.reserve(n);
    for (int i = 0; i < n; ++i) starts.push_back(2.0 * rng.in_ball(3));

    ProjectOptions opt;
    std::vector<ProjectResult> serial_out, parallel_out;
    double t_serial = time_ms([&] { serial_out = project_batch(num, starts, opt, Exec::Serial); });
    double t_parallel =
        time_ms([&] { parallel_out = project_batch(num, starts, opt, Exec::Parallel); });

    int mismatches = 0;
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) {
        if (serial_out[i].ok() != parallel_out[i].ok()) ++mismatches;
        else if (serial_out[i].ok() &&
                 (serial_out[i].point - parallel_out[i].point).cwiseAbs().maxCoeff() != 0.0)
            ++mismatches;
        if (serial_out[i].ok()) pts.push_back(serial_out[i].point);
    }
    std::printf("project_batch  n=%d  serial %.1f ms  parallel %.1f ms  speedup %.2fx  "
                "mismatches %d\n",
                n, t_serial, t_parallel, t_serial / t_parallel, mismatches);

    std::vector<TangentResult> ts, tp;
    double t_serial2 =
        time_ms([&] { ts = tangent_batch(num, pts, 1e-8, 1e-9, Exec::Serial); });
    double t_parallel2 =
        time_ms([&] { tp = tangent_batch(num, pts, 1e-8, 1e-9, Exec::Parallel); });
    int mismatch2 = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (ts[i].ok != tp[i].ok) ++mismatch2;
    std::printf("tangent_batch  n=%zu  serial %.1f ms  parallel %.1f ms  speedup %.2fx  "
                "mismatches %d\n",
                pts.size(), t_serial2, t_parallel2, t_serial2 / t_parallel2, mismatch2);
    return (mismatches || mismatch2) ? 1 : 0;
}
