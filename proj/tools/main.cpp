#include "specdec/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

using specdec::VocabMode;

void add_common(CLI::App* cmd, specdec::cli::CommonOptions& common, bool needs_corpus) {
    auto* corpus = cmd->add_option("--corpus", common.corpus_paths, "corpus text file(s)");
    if (needs_corpus) corpus->required();
    cmd->add_flag("--per-line", common.per_line, "treat each corpus line as one document");
    cmd->add_option("--vocab-mode", common.vocab_mode, "byte or word")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, VocabMode>{{"byte", VocabMode::Byte}, {"word", VocabMode::Word}},
            CLI::ignore_case));
    cmd->add_option("--model", common.model, "table:<order> or toy:<seed>:<dim>");
    cmd->add_option("--seed", common.seed, "run seed recorded in outputs");
    cmd->add_option("--profile", common.profile_path, "accelerator profile file (key=value)");
    cmd->add_option("--out", common.out_dir, "output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning-free speculative decoding harness"};
    app.require_subcommand(1);

    specdec::cli::DeriveOptions derive;
    auto* cmd_derive = app.add_subcommand("derive", "precompute n-gram tables for a model");
    add_common(cmd_derive, derive.common, true);
    cmd_derive->add_option("-K,--top-k", derive.top_k, "successors stored per token");
    cmd_derive->add_option("--w-max", derive.w_max, "stored continuation depth");

    specdec::cli::RunOptions run;
    auto* cmd_run = app.add_subcommand("run", "speculative generation at one (k, w)");
    add_common(cmd_run, run.common, true);
    cmd_run->add_option("--k", run.k, "batched speculations per call");
    cmd_run->add_option("--w", run.w, "tokens speculated into the future");
    cmd_run->add_option("--q", run.q, "context query length");
    cmd_run->add_option("--strategy", run.strategy, "mixed|context|bigram|extended|unigram");
    cmd_run->add_option("--prompts", run.prompts, "number of documents used as prompts");
    cmd_run->add_option("--max-tokens", run.max_tokens, "tokens to generate per prompt");
    cmd_run->add_option("--max-prompt-tokens", run.max_prompt_tokens,
                        "prompt truncation (0 = whole document)");
    cmd_run->add_option("--context-cap", run.context_cap,
                        "max context rows in the mixed batch (0 = uncapped)");
    cmd_run->add_option("--end-word", run.end_word, "stop word (word mode)");
    cmd_run->add_option("--unigram-variant", run.unigram_variant,
                        "norm (centered metric) or inner (signed product)");

    specdec::cli::SweepOptions sweep;
    auto* cmd_sweep = app.add_subcommand("sweep", "grid sweep over (k, w)");
    add_common(cmd_sweep, sweep.common, true);
    cmd_sweep->add_option("--k", sweep.k_values, "k grid values");
    cmd_sweep->add_option("--w", sweep.w_values, "w grid values");
    cmd_sweep->add_option("--q", sweep.q, "context query length");
    cmd_sweep->add_option("--strategy", sweep.strategy, "strategy for every cell");
    cmd_sweep->add_option("--prompts", sweep.prompts, "number of documents used as prompts");
    cmd_sweep->add_option("--max-tokens", sweep.max_tokens, "tokens to generate per prompt");
    cmd_sweep->add_option("--max-prompt-tokens", sweep.max_prompt_tokens,
                          "prompt truncation (0 = whole document)");
    cmd_sweep->add_option("--context-cap", sweep.context_cap,
                          "max context rows in the mixed batch (0 = uncapped)");
    cmd_sweep->add_option("--jobs", sweep.jobs, "worker threads (0 = hardware)");

    specdec::cli::AblateOptions ablate;
    auto* cmd_ablate = app.add_subcommand("ablate", "mixed-strategy histogram report");
    add_common(cmd_ablate, ablate.common, true);
    cmd_ablate->add_option("--k", ablate.k, "batched speculations per call");
    cmd_ablate->add_option("--w", ablate.w, "tokens speculated into the future");
    cmd_ablate->add_option("--q", ablate.q, "context query length");
    cmd_ablate->add_option("--prompts", ablate.prompts, "number of documents used as prompts");
    cmd_ablate->add_option("--max-tokens", ablate.max_tokens, "tokens to generate per prompt");
    cmd_ablate->add_option("--max-prompt-tokens", ablate.max_prompt_tokens,
                           "prompt truncation (0 = whole document)");
    cmd_ablate->add_option("--context-cap", ablate.context_cap,
                           "max context rows in the mixed batch (0 = uncapped)");

    specdec::cli::HeatmapOptions heatmap;
    auto* cmd_heatmap = app.add_subcommand("heatmap", "slowdown grids from the cost model");
    add_common(cmd_heatmap, heatmap.common, false);
    cmd_heatmap->add_option("--l", heatmap.l_values, "context lengths, one grid each");
    cmd_heatmap->add_option("--k-max", heatmap.k_max, "largest batch size in the grid");
    cmd_heatmap->add_option("--w-max", heatmap.w_max, "largest speculation width in the grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_derive->parsed()) return specdec::cli::cmd_derive(derive);
        if (cmd_run->parsed()) return specdec::cli::cmd_run(run);
        if (cmd_sweep->parsed()) return specdec::cli::cmd_sweep(sweep);
        if (cmd_ablate->parsed()) return specdec::cli::cmd_ablate(ablate);
        if (cmd_heatmap->parsed()) return specdec::cli::cmd_heatmap(heatmap);
    } catch (const specdec::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
