// Times one CEM training run with the population evaluated in parallel vs
// serially, and checks the two produce the same curve bit for bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "silkstage/cem.hpp"

using namespace silkstage;
using clk = std::chrono::steady_clock;

namespace {

double run(cem::CemConfig cfg, const stage::StageConfig& env, bool parallel,
           cem::TrainingResult* out) {
    cfg.parallel = parallel;
    auto t0 = clk::now();
    *out = cem::train_cem(cfg, env);
    return std::chrono::duration<double>(clk::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    cem::CemConfig cfg;
    cfg.population = 16;
    cfg.generations = 4;
    cfg.episodes_per_candidate = 2;
    cfg.seed = 1;
    cfg.spans = silk::RandomizationSpans{1.3, 1.5, 1.5};
    stage::StageConfig env;
    env.duration = 8.0;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const double v = std::atof(argv[i + 1]);
        if (flag == "--population") cfg.population = static_cast<int>(v);
        else if (flag == "--generations") cfg.generations = static_cast<int>(v);
        else if (flag == "--duration") env.duration = v;
        else { std::fprintf(stderr, "unknown flag %s\n", flag.c_str()); return 2; }
    }

    const long evals = static_cast<long>(cfg.population) * cfg.generations *
                       cfg.episodes_per_candidate;
    std::printf("population %d, %d generations, %ld episode evaluations of %.0f s\n",
                cfg.population, cfg.generations, evals, env.duration);

    cem::TrainingResult serial, parallel;
    const double ts = run(cfg, env, false, &serial);
    const double tp = run(cfg, env, true, &parallel);
    std::printf("serial   %7.2f s  (%6.1f evals/s)\n", ts, evals / ts);
    std::printf("parallel %7.2f s  (%6.1f evals/s)  speedup %.2fx\n", tp, evals / tp, ts / tp);

    bool same = serial.params.weights == parallel.params.weights &&
                serial.curve.size() == parallel.curve.size();
    for (std::size_t i = 0; same && i < serial.curve.size(); ++i)
        same = serial.curve[i].generation == parallel.curve[i].generation &&
               serial.curve[i].mean == parallel.curve[i].mean &&
               serial.curve[i].max == parallel.curve[i].max;
    std::printf("results %s\n", same ? "identical" : "DIFFER");
    return same ? 0 : 1;
}
