// Serial-vs-parallel sweep benchmark. Replicas are independent seeded runs,
// so the parallel path must reproduce the serial output byte for byte; this
// target times both and checks that.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qucrl/harness.hpp"

using namespace qucrl;

namespace {

double timed_sweep(const RunConfig& cfg, Exec mode, SweepResult& out) {
    const auto start = std::chrono::steady_clock::now();
    out = run_sweep(cfg, mode);
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(end - start).count();
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    cfg.env_kind = EnvKind::riverswim;
    cfg.S = 6;
    cfg.A = 2;
    cfg.horizon = (argc > 1) ? std::atoll(argv[1]) : 20000;
    const int seeds = (argc > 2) ? std::atoi(argv[2]) : 8;
    cfg.seeds.clear();
    for (int i = 1; i <= seeds; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));

    std::cout << "bench: riverswim S=6 A=2, T=" << cfg.horizon << ", " << seeds << " seeds, "
              << max_replica_threads() << " threads\n";

    cfg.out_dir = "bench_out/serial";
    SweepResult serial;
    const double t_serial = timed_sweep(cfg, Exec::serial, serial);
    std::cout << "serial:   " << t_serial << " s\n";

    cfg.out_dir = "bench_out/parallel";
    SweepResult parallel;
    const double t_parallel = timed_sweep(cfg, Exec::parallel, parallel);
    std::cout << "parallel: " << t_parallel << " s  (speedup " << t_serial / t_parallel << "x)\n";

    bool identical = true;
    for (std::size_t i = 0; i < serial.runs.size(); ++i)
        if (read_all(serial.runs[i].csv_path) != read_all(parallel.runs[i].csv_path)) identical = false;
    std::cout << "outputs " << (identical ? "identical" : "DIFFER") << "\n";
    return identical ? 0 : 1;
}
