// Times the serial vs OpenMP silk step and checks they agree bit for bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "silkstage/silk.hpp"

using namespace silkstage;
using clk = std::chrono::steady_clock;

namespace {

silk::SilkState make_state(const silk::SilkParams& p) {
    silk::SilkState s = silk::init_rest(p, Vec2{-0.6, 1.0}, Vec2{0.6, 1.0});
    // pluck a smooth half-sine so the run isn't trivially at rest
    for (std::size_t i = 1; i + 1 < s.positions.size(); ++i) {
        double x = double(i) / double(s.positions.size() - 1);
        s.positions[i].z += 0.05 * std::sin(M_PI * x);
    }
    return s;
}

double run(const silk::SilkParams& p, silk::SilkState s, int steps, bool parallel,
           double* checksum) {
    Vec2 ga = s.positions.front();
    Vec2 gb = s.positions.back();
    auto t0 = clk::now();
    for (int i = 0; i < steps; ++i) {
        s = parallel ? silk::step_parallel(s, p, ga, gb, 0.002)
                     : silk::step(s, p, ga, gb, 0.002);
    }
    auto t1 = clk::now();
    double sum = 0.0;
    for (const auto& q : s.positions) sum += q.y + q.z;
    *checksum = sum;
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int nodes = 257;
    int steps = 20000;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--nodes")) nodes = std::stoi(argv[i + 1]);
        if (!std::strcmp(argv[i], "--steps")) steps = std::stoi(argv[i + 1]);
    }

    silk::SilkParams p;
    p.node_count = nodes;
    p.segment_rest_length = 1.25 / double(nodes - 1);
    silk::SilkState s0 = make_state(p);

    double cs_serial = 0.0, cs_parallel = 0.0;
    double ts = run(p, s0, steps, false, &cs_serial);
    double tp = run(p, s0, steps, true, &cs_parallel);

    std::printf("nodes=%d steps=%d\n", nodes, steps);
    std::printf("serial   %8.3f s  (%.1f ksteps/s)\n", ts, steps / ts / 1e3);
    std::printf("parallel %8.3f s  (%.1f ksteps/s)  speedup x%.2f\n", tp,
                steps / tp / 1e3, ts / tp);
    if (std::memcmp(&cs_serial, &cs_parallel, sizeof(double)) != 0) {
        std::printf("MISMATCH: serial %.17g vs parallel %.17g\n", cs_serial,
                    cs_parallel);
        return 1;
    }
    std::printf("checksums identical (%.17g)\n", cs_serial);
    return 0;
}
