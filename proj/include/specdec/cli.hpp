#pragma once

#include "specdec/cost_model.hpp"
#include "specdec/engine.hpp"
#include "specdec/vocab.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

// Command implementations behind the specdec binary. Each command is a pure
// function of its options, input files, and seed; output files are byte
// identical across reruns. Errors in flags or inputs raise ConfigError
// (exit code 2); runtime failures raise other exceptions (exit code 1).
namespace specdec::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelSpec {
    enum class Kind { Table, Toy };
    Kind kind = Kind::Table;
    std::size_t order = 3;     // table:<order>
    std::uint64_t seed = 0;    // toy:<seed>:<dim>
    std::size_t dim = 64;
};

/// Parses "table:<order>" or "toy:<seed>:<dim>".
ModelSpec parse_model_spec(const std::string& text);

struct CommonOptions {
    std::vector<std::string> corpus_paths;
    bool per_line = false; // one document per line instead of per file
    VocabMode vocab_mode = VocabMode::Byte;
    std::string model = "table:3";
    std::uint64_t seed = 0;
    std::string profile_path; // empty: built-in default profile
    std::string out_dir = "out";
};

struct DeriveOptions {
    CommonOptions common;
    std::size_t top_k = 32;
    std::size_t w_max = 16;
};

struct RunOptions {
    CommonOptions common;
    std::size_t k = 10;
    std::size_t w = 10;
    std::size_t q = 1;
    std::string strategy = "mixed";
    std::size_t prompts = 8;
    std::size_t max_tokens = 128;
    std::size_t max_prompt_tokens = 64;  // 0: use whole documents
    std::size_t context_cap = 0;         // 0: uncapped context rows in the mix
    std::string end_word;                // word mode: stop token
    std::string unigram_variant = "norm"; // norm | inner
};

struct SweepOptions {
    CommonOptions common;
    std::vector<std::size_t> k_values = {1, 5, 10, 20, 25};
    std::vector<std::size_t> w_values = {2, 4, 6, 8, 10, 12, 14};
    std::size_t q = 1;
    std::string strategy = "mixed";
    std::size_t prompts = 8;
    std::size_t max_tokens = 128;
    std::size_t max_prompt_tokens = 64;
    std::size_t context_cap = 0;
    std::size_t jobs = 0; // 0: hardware concurrency
};

struct AblateOptions {
    CommonOptions common;
    std::size_t k = 10;
    std::size_t w = 10;
    std::size_t q = 1;
    std::size_t prompts = 8;
    std::size_t max_tokens = 128;
    std::size_t max_prompt_tokens = 64;
    std::size_t context_cap = 0;
};

struct HeatmapOptions {
    CommonOptions common; // profile_path and out_dir are used
    std::vector<std::size_t> l_values = {25, 100, 500};
    std::size_t k_max = 32;
    std::size_t w_max = 15;
};

/// Writes bigram.ngtb and extended.ngtb (and model.spdr for toy models).
int cmd_derive(const DeriveOptions& options);

/// Runs one (k, w) configuration over the prompts; writes metrics.json and
/// generations.txt plus a stdout summary.
int cmd_run(const RunOptions& options);

/// Grid sweep; writes sweep.csv (one row per cell) and sweep_summary.json
/// naming the best cell and the (10, 10) reference when present.
int cmd_sweep(const SweepOptions& options);

/// Mixed-strategy ablation; writes acceptance_length.csv, winner_rank.csv,
/// and allocation.csv.
int cmd_ablate(const AblateOptions& options);

/// Writes one slowdown-grid CSV per context length.
int cmd_heatmap(const HeatmapOptions& options);

} // namespace specdec::cli
