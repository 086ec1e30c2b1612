#pragma once

#include "specdec/trace.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace specdec {

/// Analytic accelerator profile for a single verification call on a block of
/// k rows by w+1 trailing positions at context length l.
///
///   ops    = attn_ops * k * (w+1) * (l+w)  +  mlp_ops * k * (w+1)
///   bytes  = weight_bytes + kv_bytes_per_token * l + io_bytes * k * (w+1)
///   memory = bytes / bandwidth
///   tiles  = ceil(ops / tile_ops),  waves = ceil(tiles / multiprocessors)
///   compute = waves * tile_ops / (compute / multiprocessors)
///   latency = max(memory, compute)
///
/// Rounding tiles up to whole waves produces the wave-quantization jumps; the
/// max of the two terms produces the memory-bound plateau and the compute-
/// bound ramp. All parameters must be strictly positive.
struct AcceleratorProfile {
    double bandwidth = 0;          // bytes / second
    double compute = 0;            // ops / second, whole device
    double multiprocessors = 0;    // independent execution units
    double tile_ops = 0;           // ops per tile
    double attn_ops = 0;           // ops per row-position-contexttoken
    double mlp_ops = 0;            // ops per row-position
    double io_bytes = 0;           // activation bytes per row-position
    double weight_bytes = 0;       // parameter bytes moved every call
    double kv_bytes_per_token = 0; // cached key/value bytes per context token

    void validate() const; // throws std::invalid_argument on non-positive fields
};

/// Profile whose heatmaps show a memory-bound plateau at short contexts and a
/// pronounced compute-bound region at long contexts within k <= 32, w <= 15.
AcceleratorProfile default_profile();

/// key=value text file, one field per line; '#' starts a comment.
AcceleratorProfile load_profile(const std::filesystem::path& path);
void save_profile(const AcceleratorProfile& profile, std::ostream& os);

double call_latency(const AcceleratorProfile& profile, std::size_t l, std::size_t k,
                    std::size_t w);

/// call_latency(l, k, w) / call_latency(l, 1, 0); exactly 1.0 at (1, 0).
double slowdown(const AcceleratorProfile& profile, std::size_t l, std::size_t k, std::size_t w);

/// Slowdown values over a (k, w) grid at fixed context length.
struct LatencyGrid {
    std::size_t context_len = 0;
    std::vector<std::size_t> k_values;
    std::vector<std::size_t> w_values;
    std::vector<double> values; // k-major

    double at(std::size_t ki, std::size_t wi) const {
        return values[ki * w_values.size() + wi];
    }
};

/// Grid of slowdowns; every entry is checked finite and at least `floor`.
LatencyGrid make_heatmap(const AcceleratorProfile& profile, std::size_t l,
                         const std::vector<std::size_t>& k_values,
                         const std::vector<std::size_t>& w_values,
                         double floor = 1.0 - 1e-9);

/// CSV with header "l,k,w,slowdown".
void write_heatmap_csv(const LatencyGrid& grid, std::ostream& os);

/// Modeled seconds for a recorded run and for the greedy baseline that would
/// have emitted the same tokens: the baseline replays one (1, 0) call per
/// emitted token at the context length that step would have had.
struct SimulatedCost {
    double baseline_seconds = 0.0;
    double speculative_seconds = 0.0;
};

SimulatedCost simulate_cost(std::span<const CallTrace> trace, std::size_t token_count,
                            const AcceleratorProfile& profile);

/// baseline_seconds / speculative_seconds for one recorded run.
double simulate_speedup(std::span<const CallTrace> trace, std::size_t token_count,
                        const AcceleratorProfile& profile);

} // namespace specdec
