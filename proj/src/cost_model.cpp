#include "specdec/cost_model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace specdec {

void AcceleratorProfile::validate() const {
    const struct {
        const char* name;
        double value;
    } fields[] = {
        {"bandwidth", bandwidth},
        {"compute", compute},
        {"multiprocessors", multiprocessors},
        {"tile_ops", tile_ops},
        {"attn_ops", attn_ops},
        {"mlp_ops", mlp_ops},
        {"io_bytes", io_bytes},
        {"weight_bytes", weight_bytes},
        {"kv_bytes_per_token", kv_bytes_per_token},
    };
    for (const auto& f : fields)
        if (!(f.value > 0.0) || !std::isfinite(f.value))
            throw std::invalid_argument(std::string("profile field must be positive: ") + f.name);
}

AcceleratorProfile default_profile() {
    // Calibrated against a 7B-parameter half-precision decoder on a
    // high-bandwidth accelerator. attn_ops is an effective coefficient: it
    // folds in the per-row cache reads of naive batching, which is what makes
    // long contexts go compute-bound earlier.
    AcceleratorProfile p;
    p.bandwidth = 1.5e12;
    p.compute = 3.0e14;
    p.multiprocessors = 108;
    p.tile_ops = 2.0e9;
    p.attn_ops = 5.0e7;
    p.mlp_ops = 1.4e10;
    p.io_bytes = 5.0e5;
    p.weight_bytes = 1.4e10;
    p.kv_bytes_per_token = 1.3e5;
    return p;
}

AcceleratorProfile load_profile(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open profile: " + path.string());

    std::map<std::string, double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("profile line " + std::to_string(lineno) +
                                     ": expected key=value");
        const std::string value = trimmed.substr(eq + 1);
        try {
            std::size_t consumed = 0;
            const double parsed = std::stod(value, &consumed);
            if (consumed != value.size()) throw std::invalid_argument(value);
            values[trimmed.substr(0, eq)] = parsed;
        } catch (const std::exception&) {
            throw std::runtime_error("profile line " + std::to_string(lineno) +
                                     ": bad numeric value '" + value + "'");
        }
    }

    AcceleratorProfile p;
    const struct {
        const char* name;
        double* slot;
    } fields[] = {
        {"bandwidth", &p.bandwidth},
        {"compute", &p.compute},
        {"multiprocessors", &p.multiprocessors},
        {"tile_ops", &p.tile_ops},
        {"attn_ops", &p.attn_ops},
        {"mlp_ops", &p.mlp_ops},
        {"io_bytes", &p.io_bytes},
        {"weight_bytes", &p.weight_bytes},
        {"kv_bytes_per_token", &p.kv_bytes_per_token},
    };
    for (const auto& f : fields) {
        auto it = values.find(f.name);
        if (it == values.end())
            throw std::runtime_error(std::string("profile missing field: ") + f.name);
        *f.slot = it->second;
    }
    p.validate();
    return p;
}

void save_profile(const AcceleratorProfile& p, std::ostream& os) {
    os << "bandwidth=" << p.bandwidth << "\n"
       << "compute=" << p.compute << "\n"
       << "multiprocessors=" << p.multiprocessors << "\n"
       << "tile_ops=" << p.tile_ops << "\n"
       << "attn_ops=" << p.attn_ops << "\n"
       << "mlp_ops=" << p.mlp_ops << "\n"
       << "io_bytes=" << p.io_bytes << "\n"
       << "weight_bytes=" << p.weight_bytes << "\n"
       << "kv_bytes_per_token=" << p.kv_bytes_per_token << "\n";
}

double call_latency(const AcceleratorProfile& profile, std::size_t l, std::size_t k,
                    std::size_t w) {
    profile.validate();
    if (l < 1 || k < 1) throw std::invalid_argument("l and k must be at least 1");

    const double positions = static_cast<double>(k) * static_cast<double>(w + 1);
    const double ops = profile.attn_ops * positions * static_cast<double>(l + w) +
                       profile.mlp_ops * positions;
    const double bytes = profile.weight_bytes +
                         profile.kv_bytes_per_token * static_cast<double>(l) +
                         profile.io_bytes * positions;

    const double memory_time = bytes / profile.bandwidth;
    const double tiles = std::ceil(ops / profile.tile_ops);
    const double waves = std::ceil(tiles / profile.multiprocessors);
    const double compute_time = waves * profile.tile_ops / (profile.compute / profile.multiprocessors);
    return std::max(memory_time, compute_time);
}

double slowdown(const AcceleratorProfile& profile, std::size_t l, std::size_t k, std::size_t w) {
    return call_latency(profile, l, k, w) / call_latency(profile, l, 1, 0);
}

LatencyGrid make_heatmap(const AcceleratorProfile& profile, std::size_t l,
                         const std::vector<std::size_t>& k_values,
                         const std::vector<std::size_t>& w_values, double floor) {
    if (k_values.empty() || w_values.empty())
        throw std::invalid_argument("heatmap ranges must be non-empty");
    LatencyGrid grid;
    grid.context_len = l;
    grid.k_values = k_values;
    grid.w_values = w_values;
    grid.values.reserve(k_values.size() * w_values.size());
    for (std::size_t k : k_values)
        for (std::size_t w : w_values) {
            const double s = slowdown(profile, l, k, w);
            if (!std::isfinite(s) || s < floor)
                throw std::logic_error("slowdown entry below floor");
            grid.values.push_back(s);
        }
    return grid;
}

void write_heatmap_csv(const LatencyGrid& grid, std::ostream& os) {
    os << "l,k,w,slowdown\n";
    for (std::size_t ki = 0; ki < grid.k_values.size(); ++ki)
        for (std::size_t wi = 0; wi < grid.w_values.size(); ++wi)
            os << grid.context_len << ',' << grid.k_values[ki] << ',' << grid.w_values[wi]
               << ',' << grid.at(ki, wi) << '\n';
}

SimulatedCost simulate_cost(std::span<const CallTrace> trace, std::size_t token_count,
                            const AcceleratorProfile& profile) {
    if (trace.empty()) throw std::invalid_argument("empty trace");
    const std::size_t prompt_len = trace.front().context_len;

    SimulatedCost cost;
    for (const CallTrace& t : trace)
        cost.speculative_seconds += call_latency(profile, t.context_len, t.batch, t.width);
    for (std::size_t j = 0; j < token_count; ++j)
        cost.baseline_seconds += call_latency(profile, prompt_len + j, 1, 0);
    return cost;
}

double simulate_speedup(std::span<const CallTrace> trace, std::size_t token_count,
                        const AcceleratorProfile& profile) {
    const SimulatedCost cost = simulate_cost(trace, token_count, profile);
    return cost.baseline_seconds / cost.speculative_seconds;
}

} // namespace specdec
