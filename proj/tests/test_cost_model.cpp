#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specdec/cost_model.hpp"
#include "specdec/rng.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace specdec;

namespace {

AcceleratorProfile tiny_profile() {
    AcceleratorProfile p;
    p.bandwidth = 100.0;
    p.compute = 1000.0;
    p.multiprocessors = 2.0;
    p.tile_ops = 10.0;
    p.attn_ops = 1.0;
    p.mlp_ops = 1.0;
    p.io_bytes = 1.0;
    p.weight_bytes = 1000.0;
    p.kv_bytes_per_token = 10.0;
    return p;
}

std::size_t plateau_cells(const AcceleratorProfile& p, std::size_t l) {
    std::size_t count = 0;
    for (std::size_t k = 1; k <= 32; ++k)
        for (std::size_t w = 0; w <= 15; ++w)
            if (slowdown(p, l, k, w) < 1.05) ++count;
    return count;
}

} // namespace

TEST_CASE("the baseline cell normalizes to exactly 1.0") {
    const AcceleratorProfile p = default_profile();
    for (std::size_t l : {1, 25, 100, 500, 4096})
        CHECK(slowdown(p, l, 1, 0) == 1.0);
}

TEST_CASE("hand-evaluated memory-bound latency") {
    const AcceleratorProfile p = tiny_profile();
    // l=5, k=1, w=0: ops = 1*1*1*5 + 1*1*1 = 6 -> 1 tile -> 1 wave
    // compute = 1 * 10 / (1000/2) = 0.02; bytes = 1000 + 50 + 1 = 1051
    // memory = 10.51 dominates
    CHECK(call_latency(p, 5, 1, 0) == doctest::Approx(10.51).epsilon(1e-12));

    // deep compute case: k=100, w=9: positions = 1000, ops = 1000*(5+9) + 1000
    // = 15000 -> 1500 tiles -> 750 waves -> compute = 750*10/500 = 15
    // bytes = 1000 + 50 + 1000 = 2050 -> memory = 20.5 still dominates
    CHECK(call_latency(p, 5, 100, 9) == doctest::Approx(20.5).epsilon(1e-12));

    // same shape with cheap io: drop io to make compute win
    AcceleratorProfile q = tiny_profile();
    q.io_bytes = 1e-6;
    CHECK(call_latency(q, 5, 100, 9) == doctest::Approx(15.0).epsilon(1e-9));
}

TEST_CASE("memory-bound slowdown is exactly the byte ratio") {
    const AcceleratorProfile p = tiny_profile();
    // l=5: both (1,0) and (2,0) are memory-bound, so the slowdown is
    // (weights + kv + 2 io) / (weights + kv + io) = 1052 / 1051
    CHECK(slowdown(p, 5, 2, 0) == doctest::Approx(1052.0 / 1051.0).epsilon(1e-6));
}

TEST_CASE("doubling k deep in the compute-bound regime doubles latency") {
    AcceleratorProfile p = tiny_profile();
    p.io_bytes = 1e-6;
    p.weight_bytes = 1e-6;
    p.kv_bytes_per_token = 1e-6;
    // waves >> 1 here, so the ceilings are a small perturbation
    const double once = call_latency(p, 50, 64, 7);
    const double twice = call_latency(p, 50, 128, 7);
    CHECK(twice / once >= 1.9);
    CHECK(twice / once <= 2.1);
}

TEST_CASE("latency is monotone in every argument") {
    const AcceleratorProfile p = default_profile();
    for (std::size_t l : {25, 100, 500}) {
        for (std::size_t k = 1; k <= 32; ++k)
            for (std::size_t w = 0; w <= 15; ++w) {
                const double base = call_latency(p, l, k, w);
                CHECK(call_latency(p, l + 7, k, w) >= base);
                CHECK(call_latency(p, l, k + 1, w) >= base);
                CHECK(call_latency(p, l, k, w + 1) >= base);
            }
    }
}

TEST_CASE("slowdown is non-decreasing in k at fixed l and w") {
    const AcceleratorProfile p = default_profile();
    for (std::size_t w : {0, 5, 15})
        for (std::size_t k = 1; k < 32; ++k)
            CHECK(slowdown(p, 100, k + 1, w) >= slowdown(p, 100, k, w));
}

TEST_CASE("a degenerate single-tile device has no plateau") {
    AcceleratorProfile p = tiny_profile();
    p.multiprocessors = 1.0;
    p.tile_ops = 1.0;
    p.weight_bytes = 1e-6; // compute-bound everywhere
    p.kv_bytes_per_token = 1e-6;
    p.io_bytes = 1e-6;
    for (std::size_t k = 1; k <= 4; ++k)
        for (std::size_t w = 0; w <= 4; ++w) {
            if (k == 1 && w == 0) continue;
            CHECK(slowdown(p, 10, k, w) > 1.0);
            CHECK(slowdown(p, 10, k + 1, w) > slowdown(p, 10, k, w));
            CHECK(slowdown(p, 10, k, w + 1) > slowdown(p, 10, k, w));
        }
}

TEST_CASE("the default profile shows the memory/compute phase transition") {
    const AcceleratorProfile p = default_profile();
    // near-baseline cells stay on the plateau at short context
    CHECK(slowdown(p, 25, 2, 1) < 1.05);
    // the far corner at long context is heavily compute-bound
    bool deep = false;
    for (std::size_t k = 1; k <= 32 && !deep; ++k)
        for (std::size_t w = 0; w <= 15 && !deep; ++w)
            deep = slowdown(p, 500, k, w) > 2.0;
    CHECK(deep);
}

TEST_CASE("the plateau shrinks as the context grows") {
    const AcceleratorProfile p = default_profile();
    const std::size_t at25 = plateau_cells(p, 25);
    const std::size_t at100 = plateau_cells(p, 100);
    const std::size_t at500 = plateau_cells(p, 500);
    CHECK(at25 >= at100);
    CHECK(at100 >= at500);
    CHECK(at25 > at500); // strictly smaller over the full sweep
}

TEST_CASE("heatmaps carry an exact 1.0 at the baseline cell") {
    const AcceleratorProfile p = default_profile();
    const LatencyGrid grid = make_heatmap(p, 25, {1, 2, 4}, {0, 1, 2});
    CHECK(grid.at(0, 0) == 1.0);
    CHECK_THROWS_AS(make_heatmap(p, 25, {}, {0}), std::invalid_argument);

    std::ostringstream csv;
    write_heatmap_csv(grid, csv);
    CHECK(csv.str().rfind("l,k,w,slowdown\n", 0) == 0);
    CHECK(csv.str().find("25,1,0,1\n") != std::string::npos);
}

TEST_CASE("profile parameters must be positive") {
    AcceleratorProfile p = tiny_profile();
    p.tile_ops = 0.0;
    CHECK_THROWS_AS(call_latency(p, 1, 1, 0), std::invalid_argument);
    p = tiny_profile();
    p.bandwidth = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("profile files round trip and reject malformed input") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "specdec_profile_test";
    fs::create_directories(dir);

    const AcceleratorProfile p = default_profile();
    {
        std::ofstream os(dir / "p.profile");
        os << "# test profile\n";
        save_profile(p, os);
    }
    const AcceleratorProfile loaded = load_profile(dir / "p.profile");
    CHECK(loaded.bandwidth == p.bandwidth);
    CHECK(loaded.kv_bytes_per_token == p.kv_bytes_per_token);

    {
        std::ofstream os(dir / "bad.profile");
        os << "bandwidth=1e12\n"; // everything else missing
    }
    CHECK_THROWS_AS(load_profile(dir / "bad.profile"), std::runtime_error);
    CHECK_THROWS_AS(load_profile(dir / "missing.profile"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("simulated speedup limiting cases") {
    AcceleratorProfile p = tiny_profile();
    p.weight_bytes = 1e9; // memory-bound everywhere, weights dominate
    const CallTrace one{50, 5, 9};
    CHECK(simulate_speedup({&one, 1}, 10, p) == doctest::Approx(10.0).epsilon(0.01));

    // a (1, 0) trace reproduces the baseline exactly
    std::vector<CallTrace> baseline;
    for (std::size_t j = 0; j < 12; ++j) baseline.push_back({30 + j, 1, 0});
    CHECK(simulate_speedup(baseline, 12, default_profile()) == 1.0);

    CHECK_THROWS_AS(simulate_speedup({}, 5, p), std::invalid_argument);
}

TEST_CASE("simulated speedup never exceeds tokens per call") {
    const AcceleratorProfile p = default_profile();
    Rng rng(8);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t prompt_len = 1 + rng.below(300);
        std::vector<CallTrace> trace;
        std::size_t l = prompt_len, tokens = 0;
        const std::size_t calls = 1 + rng.below(30);
        for (std::size_t c = 0; c < calls; ++c) {
            const std::size_t k = 1 + rng.below(25);
            const std::size_t w = rng.below(15);
            trace.push_back({l, k, w});
            const std::size_t emitted = 1 + rng.below(w + 1);
            tokens += emitted;
            l += emitted;
        }
        const double speedup = simulate_speedup(trace, tokens, p);
        const double tokens_per_call = static_cast<double>(tokens) / static_cast<double>(calls);
        CHECK(speedup <= tokens_per_call + 1e-9);
    }
}
