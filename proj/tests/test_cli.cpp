#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specdec/cli.hpp"
#include "specdec/ngram_tables.hpp"
#include "specdec/table_model.hpp"

#include "support/oracles.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace specdec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path path;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path write_corpus(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "corpus.txt";
    std::ofstream os(p, std::ios::binary);
    os << text;
    return p;
}

cli::CommonOptions word_common(const fs::path& corpus, const fs::path& out) {
    cli::CommonOptions common;
    common.corpus_paths = {corpus.string()};
    common.vocab_mode = VocabMode::Word;
    common.model = "table:3";
    common.out_dir = out.string();
    return common;
}

} // namespace

TEST_CASE("model specs parse and reject garbage") {
    const cli::ModelSpec table = cli::parse_model_spec("table:2");
    CHECK(table.kind == cli::ModelSpec::Kind::Table);
    CHECK(table.order == 2);

    const cli::ModelSpec toy = cli::parse_model_spec("toy:99:16");
    CHECK(toy.kind == cli::ModelSpec::Kind::Toy);
    CHECK(toy.seed == 99);
    CHECK(toy.dim == 16);

    CHECK_THROWS_AS(cli::parse_model_spec("gpt4"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_model_spec("table:zero"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_model_spec("toy:1"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_model_spec("table:0"), cli::ConfigError);
}

TEST_CASE("derive writes loadable, reproducible tables") {
    TempDir tmp("specdec_cli_derive");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(50));

    cli::DeriveOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.top_k = 10;
    opts.w_max = 10;
    REQUIRE(cli::cmd_derive(opts) == 0);

    const Vocab vocab = Vocab::build(testsupport::periodic_corpus(50), VocabMode::Word);
    const TokenSeq tokens = vocab.tokenize(testsupport::periodic_corpus(50));
    const TableModel model = TableModel::from_corpus(tokens, 3, vocab.size());
    const BigramTable bigram = BigramTable::derive(model, 10);
    const ExtendedBigramTable extended = ExtendedBigramTable::extend(model, bigram, 10);

    CHECK(BigramTable::load_file(tmp.path / "out" / "bigram.ngtb") == bigram);
    CHECK(ExtendedBigramTable::load_file(tmp.path / "out" / "extended.ngtb") == extended);

    const std::string first = slurp(tmp.path / "out" / "extended.ngtb");
    REQUIRE(cli::cmd_derive(opts) == 0);
    CHECK(slurp(tmp.path / "out" / "extended.ngtb") == first);
}

TEST_CASE("derive names the vocabulary bound when K is too large") {
    TempDir tmp("specdec_cli_derive_k");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(3));
    cli::DeriveOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.top_k = 64; // vocab is 21
    CHECK_THROWS_WITH_AS(cli::cmd_derive(opts),
                         "K (64) exceeds vocabulary size (21)", cli::ConfigError);
}

TEST_CASE("derive saves toy model weights alongside the tables") {
    TempDir tmp("specdec_cli_derive_toy");
    const fs::path corpus = write_corpus(tmp.path, std::string("abcabcabc"));
    cli::DeriveOptions opts;
    opts.common.corpus_paths = {corpus.string()};
    opts.common.vocab_mode = VocabMode::Byte;
    opts.common.model = "toy:5:8";
    opts.common.out_dir = (tmp.path / "out").string();
    opts.top_k = 4;
    opts.w_max = 3;
    REQUIRE(cli::cmd_derive(opts) == 0);
    CHECK(fs::exists(tmp.path / "out" / "model.spdr"));
}

TEST_CASE("a (1, 0) run is the exact greedy baseline") {
    TempDir tmp("specdec_cli_run_baseline");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(50));

    cli::RunOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.k = 1;
    opts.w = 0;
    opts.prompts = 1;
    opts.max_tokens = 40;
    opts.max_prompt_tokens = 20;
    REQUIRE(cli::cmd_run(opts) == 0);

    const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "run_summary.json"));
    CHECK(summary["tokens_per_call"].get<double>() == 1.0);
    CHECK(summary["sim_speedup"].get<double>() == 1.0);
}

TEST_CASE("a mixed run on the periodic corpus accelerates and reruns byte-identically") {
    TempDir tmp("specdec_cli_run_mixed");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(50));

    cli::RunOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.k = 10;
    opts.w = 10;
    opts.prompts = 1;
    opts.max_tokens = 200;
    opts.max_prompt_tokens = 20;
    REQUIRE(cli::cmd_run(opts) == 0);

    const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "run_summary.json"));
    CHECK(summary["tokens_per_call"].get<double>() > 1.5);

    const std::string metrics = slurp(tmp.path / "out" / "metrics.json");
    const std::string generations = slurp(tmp.path / "out" / "generations.txt");
    REQUIRE(cli::cmd_run(opts) == 0);
    CHECK(slurp(tmp.path / "out" / "metrics.json") == metrics);
    CHECK(slurp(tmp.path / "out" / "generations.txt") == generations);
}

TEST_CASE("the unigram strategy needs an embedding model") {
    TempDir tmp("specdec_cli_run_unigram");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(20));
    cli::RunOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.strategy = "unigram";
    opts.k = 3;
    opts.w = 1;
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);

    opts.strategy = "madeup";
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);

    opts.strategy = "bigram";
    opts.w = 4;
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);
}

TEST_CASE("sweep emits one row per cell and a consistent argmax") {
    TempDir tmp("specdec_cli_sweep");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(50));

    cli::SweepOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.k_values = {1, 2, 10};
    opts.w_values = {2, 10};
    opts.prompts = 1;
    opts.max_tokens = 60;
    opts.max_prompt_tokens = 20;
    opts.jobs = 2;
    REQUIRE(cli::cmd_sweep(opts) == 0);

    std::istringstream csv(slurp(tmp.path / "out" / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "strategy,k,w,tokens_per_call,sim_speedup");
    std::size_t rows = 0;
    double best_speedup = 0.0;
    while (std::getline(csv, line)) {
        ++rows;
        const auto last_comma = line.rfind(',');
        best_speedup = std::max(best_speedup, std::stod(line.substr(last_comma + 1)));
    }
    CHECK(rows == 6);

    const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "sweep_summary.json"));
    CHECK(summary["rows"].get<std::size_t>() == 6);
    CHECK(summary["best_sim_speedup"].get<double>() == doctest::Approx(best_speedup));
    CHECK(summary.contains("reference")); // (10, 10) is in this grid
    CHECK(summary["reference"]["k"].get<int>() == 10);
}

TEST_CASE("sweep output is identical for any worker count") {
    TempDir tmp("specdec_cli_sweep_jobs");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(40));

    cli::SweepOptions opts;
    opts.common.corpus_paths = {corpus.string()};
    opts.common.vocab_mode = VocabMode::Byte;
    opts.common.model = "toy:3:8";
    opts.k_values = {1, 2, 4};
    opts.w_values = {1, 3};
    opts.prompts = 2;
    opts.max_tokens = 24;
    opts.max_prompt_tokens = 24;

    opts.common.out_dir = (tmp.path / "serial").string();
    opts.jobs = 1;
    REQUIRE(cli::cmd_sweep(opts) == 0);

    opts.common.out_dir = (tmp.path / "parallel").string();
    opts.jobs = 6;
    REQUIRE(cli::cmd_sweep(opts) == 0);

    CHECK(slurp(tmp.path / "serial" / "sweep.csv") == slurp(tmp.path / "parallel" / "sweep.csv"));
    CHECK(slurp(tmp.path / "serial" / "sweep_summary.json") ==
          slurp(tmp.path / "parallel" / "sweep_summary.json"));
}

TEST_CASE("ablation histograms conserve the call count") {
    TempDir tmp("specdec_cli_ablate");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(50));

    cli::AblateOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.k = 5;
    opts.w = 4;
    opts.prompts = 1;
    opts.max_tokens = 80;
    opts.max_prompt_tokens = 20;
    REQUIRE(cli::cmd_ablate(opts) == 0);

    const auto run_summary_calls = [&] {
        std::istringstream csv(slurp(tmp.path / "out" / "acceptance_length.csv"));
        std::string line;
        std::getline(csv, line); // header
        std::size_t total = 0;
        while (std::getline(csv, line))
            total += std::stoull(line.substr(line.find(',') + 1));
        return total;
    }();

    std::size_t rank_total = 0;
    {
        std::istringstream csv(slurp(tmp.path / "out" / "winner_rank.csv"));
        std::string line;
        std::getline(csv, line);
        while (std::getline(csv, line))
            rank_total += std::stoull(line.substr(line.find(',') + 1));
    }
    CHECK(rank_total == run_summary_calls);

    // each strategy's allocation histogram conserves the call count
    std::size_t context_total = 0, bigram_total = 0;
    {
        std::istringstream csv(slurp(tmp.path / "out" / "allocation.csv"));
        std::string line;
        std::getline(csv, line);
        while (std::getline(csv, line)) {
            const auto first = line.find(',');
            const auto second = line.find(',', first + 1);
            const std::size_t calls = std::stoull(line.substr(second + 1));
            if (line.rfind("context,", 0) == 0) context_total += calls;
            if (line.rfind("model_bigram,", 0) == 0) bigram_total += calls;
        }
    }
    CHECK(context_total == run_summary_calls);
    CHECK(bigram_total == run_summary_calls);
}

TEST_CASE("heatmap writes one normalized grid per context length") {
    TempDir tmp("specdec_cli_heatmap");
    cli::HeatmapOptions opts;
    opts.common.out_dir = (tmp.path / "out").string();
    opts.l_values = {25, 100, 500};
    opts.k_max = 8;
    opts.w_max = 4;
    REQUIRE(cli::cmd_heatmap(opts) == 0);

    for (std::size_t l : {25, 100, 500}) {
        const fs::path file = tmp.path / "out" / ("heatmap_l" + std::to_string(l) + ".csv");
        REQUIRE(fs::exists(file));
        const std::string content = slurp(file);
        CHECK(content.find(std::to_string(l) + ",1,0,1\n") != std::string::npos);
    }
}

TEST_CASE("multiple corpus files and per-line documents feed multiple prompts") {
    TempDir tmp("specdec_cli_multifile");
    const fs::path a = tmp.path / "a.txt";
    const fs::path b = tmp.path / "b.txt";
    {
        std::ofstream os(a, std::ios::binary);
        os << testsupport::periodic_sentence() << "\n" << testsupport::periodic_sentence() << "\n";
    }
    {
        std::ofstream os(b, std::ios::binary);
        os << testsupport::periodic_corpus(30) << "\n";
    }

    cli::RunOptions opts;
    opts.common.corpus_paths = {a.string(), b.string()};
    opts.common.per_line = true;
    opts.common.vocab_mode = VocabMode::Word;
    opts.common.model = "table:2";
    opts.common.out_dir = (tmp.path / "out").string();
    opts.strategy = "context";
    opts.k = 4;
    opts.w = 4;
    opts.prompts = 3;
    opts.max_tokens = 40;
    opts.max_prompt_tokens = 20;
    REQUIRE(cli::cmd_run(opts) == 0);

    const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "run_summary.json"));
    CHECK(summary["prompts"].get<std::size_t>() == 3);
    CHECK(summary["token_count"].get<std::size_t>() >= 3 * 40);

    // three prompt records in the generations file
    const std::string generations = slurp(tmp.path / "out" / "generations.txt");
    std::size_t records = 0;
    for (std::size_t pos = 0; (pos = generations.find("### prompt", pos)) != std::string::npos;
         ++pos)
        ++records;
    CHECK(records == 3);
}

TEST_CASE("under a flat-latency profile the sweep argmax is the tokens-per-call argmax") {
    TempDir tmp("specdec_cli_flat_profile");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(50));

    // weights dominate, kv/io vanish numerically, compute is free: every call
    // costs the same, so speedup reduces to tokens per call exactly
    const fs::path profile = tmp.path / "flat.profile";
    {
        std::ofstream os(profile);
        os << "bandwidth=1e12\ncompute=1e30\nmultiprocessors=1\ntile_ops=1\n"
              "attn_ops=1\nmlp_ops=1\nio_bytes=1e-300\nweight_bytes=1e10\n"
              "kv_bytes_per_token=1e-300\n";
    }

    cli::SweepOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.common.profile_path = profile.string();
    opts.k_values = {1, 5, 10};
    opts.w_values = {2, 6};
    opts.prompts = 1;
    opts.max_tokens = 60;
    opts.max_prompt_tokens = 20;
    REQUIRE(cli::cmd_sweep(opts) == 0);

    std::istringstream csv(slurp(tmp.path / "out" / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    double best_tpc = 0.0, best_speedup = 0.0;
    std::string tpc_cell, speedup_cell;
    while (std::getline(csv, line)) {
        std::istringstream fields(line);
        std::string strategy, k, w, tpc, speedup;
        std::getline(fields, strategy, ',');
        std::getline(fields, k, ',');
        std::getline(fields, w, ',');
        std::getline(fields, tpc, ',');
        std::getline(fields, speedup, ',');
        CHECK(std::stod(tpc) == doctest::Approx(std::stod(speedup)).epsilon(1e-9));
        if (std::stod(tpc) > best_tpc) {
            best_tpc = std::stod(tpc);
            tpc_cell = k + "," + w;
        }
        if (std::stod(speedup) > best_speedup) {
            best_speedup = std::stod(speedup);
            speedup_cell = k + "," + w;
        }
    }
    CHECK(tpc_cell == speedup_cell);
}

TEST_CASE("end-word handling is validated") {
    TempDir tmp("specdec_cli_end_word");
    const fs::path corpus = write_corpus(tmp.path, testsupport::periodic_corpus(30));

    cli::RunOptions opts;
    opts.common = word_common(corpus, tmp.path / "out");
    opts.k = 2;
    opts.w = 2;
    opts.prompts = 1;
    opts.max_tokens = 30;
    opts.max_prompt_tokens = 20;

    opts.end_word = "not-a-word";
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);

    opts.end_word = "tango"; // last word of the sentence, hit once per period
    REQUIRE(cli::cmd_run(opts) == 0);
    const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "run_summary.json"));
    CHECK(summary["token_count"].get<std::size_t>() < 30); // stopped at the end word

    opts.common.vocab_mode = VocabMode::Byte;
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);

    opts.common.vocab_mode = VocabMode::Word;
    opts.end_word.clear();
    opts.unigram_variant = "bogus";
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);
}

TEST_CASE("missing corpus paths are configuration errors") {
    cli::RunOptions opts;
    opts.common.out_dir = (fs::temp_directory_path() / "specdec_cli_none").string();
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);

    opts.common.corpus_paths = {"/nonexistent/specdec/corpus.txt"};
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::ConfigError);
}
