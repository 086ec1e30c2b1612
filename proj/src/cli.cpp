#include "specdec/cli.hpp"

#include "specdec/table_model.hpp"
#include "specdec/toy_transformer.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace specdec::cli {

namespace {

std::size_t parse_size(const std::string& text, const char* what) {
    const bool digits_only =
        !text.empty() && std::all_of(text.begin(), text.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
    if (digits_only) {
        try {
            return static_cast<std::size_t>(std::stoull(text));
        } catch (const std::exception&) {
            // fall through to the error below (out of range)
        }
    }
    throw ConfigError(std::string("invalid ") + what + ": '" + text + "'");
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open corpus file: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct Corpus {
    std::string text;              // everything, for vocab and model building
    std::vector<std::string> docs; // prompt sources
};

Corpus load_corpus(const CommonOptions& common) {
    if (common.corpus_paths.empty()) throw ConfigError("no corpus files given (--corpus)");
    Corpus corpus;
    for (const auto& path : common.corpus_paths) {
        std::string content = read_file(path);
        if (common.per_line) {
            std::istringstream ss(content);
            std::string line;
            while (std::getline(ss, line))
                if (!line.empty()) corpus.docs.push_back(line);
        } else {
            corpus.docs.push_back(content);
        }
        if (!corpus.text.empty()) corpus.text.push_back('\n');
        corpus.text += content;
    }
    return corpus;
}

struct Workbench {
    Vocab vocab;
    TokenSeq corpus_tokens;
    std::unique_ptr<Predictor> model;
    std::vector<TokenSeq> prompts;
};

Workbench prepare(const CommonOptions& common, std::size_t prompt_count,
                  std::size_t max_prompt_tokens) {
    const Corpus corpus = load_corpus(common);

    Workbench wb{Vocab::build(corpus.text, common.vocab_mode), {}, nullptr, {}};
    wb.corpus_tokens = wb.vocab.tokenize(corpus.text);

    const ModelSpec spec = parse_model_spec(common.model);
    if (spec.kind == ModelSpec::Kind::Table) {
        try {
            wb.model = std::make_unique<TableModel>(
                TableModel::from_corpus(wb.corpus_tokens, spec.order, wb.vocab.size()));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        if (wb.vocab.size() > ToyTransformer::kMaxVocab)
            throw ConfigError("vocabulary size " + std::to_string(wb.vocab.size()) +
                              " exceeds the toy model maximum of " +
                              std::to_string(ToyTransformer::kMaxVocab));
        wb.model = std::make_unique<ToyTransformer>(spec.seed, wb.vocab.size(), spec.dim);
    }

    for (const auto& doc : corpus.docs) {
        if (prompt_count != 0 && wb.prompts.size() >= prompt_count) break;
        TokenSeq tokens = wb.vocab.tokenize(doc);
        if (max_prompt_tokens > 0 && tokens.size() > max_prompt_tokens)
            tokens.resize(max_prompt_tokens);
        if (!tokens.empty()) wb.prompts.push_back(std::move(tokens));
    }
    return wb;
}

struct Tables {
    std::optional<BigramTable> bigram;
    std::optional<ExtendedBigramTable> extended;
    std::optional<UnigramRanking> unigram;

    DraftTables view() const {
        DraftTables t;
        if (bigram) t.bigram = &*bigram;
        if (extended) t.extended = &*extended;
        if (unigram) t.unigram = &*unigram;
        return t;
    }
};

UnigramVariant parse_unigram_variant(const std::string& name) {
    if (name == "norm") return UnigramVariant::CenteredNorm;
    if (name == "inner") return UnigramVariant::SignedInner;
    throw ConfigError("unknown unigram variant '" + name + "' (expected norm|inner)");
}

Tables derive_tables(StrategyKind kind, const Predictor& model, std::size_t max_k,
                     std::size_t max_w,
                     UnigramVariant variant = UnigramVariant::CenteredNorm) {
    Tables tables;
    const std::size_t top_k = std::min(std::max<std::size_t>(max_k, 1), model.vocab_size());
    const std::size_t width = std::max<std::size_t>(max_w, 1);
    switch (kind) {
        case StrategyKind::Mixed:
        case StrategyKind::Extended:
            tables.bigram = BigramTable::derive(model, top_k);
            tables.extended = ExtendedBigramTable::extend(model, *tables.bigram, width);
            break;
        case StrategyKind::Bigram:
            tables.bigram = BigramTable::derive(model, top_k);
            break;
        case StrategyKind::Unigram:
            if (!model.has_embeddings())
                throw ConfigError(
                    "the unigram strategy needs a model with embeddings (use toy:<seed>:<dim>)");
            tables.unigram = derive_unigram(model, variant);
            break;
        case StrategyKind::Context:
            break;
    }
    return tables;
}

StrategyKind parse_strategy_or_throw(const std::string& name) {
    const auto kind = parse_strategy(name);
    if (!kind)
        throw ConfigError("unknown strategy '" + name +
                          "' (expected mixed|context|bigram|extended|unigram)");
    return *kind;
}

void check_strategy_width(StrategyKind kind, std::size_t w) {
    if (w == 0) return; // draft-free baseline, strategy unused
    if ((kind == StrategyKind::Bigram || kind == StrategyKind::Unigram) && w != 1)
        throw ConfigError(std::string(to_string(kind)) + " strategy requires w == 1");
}

struct AggregateRun {
    RunMetrics metrics;
    SimulatedCost cost;
    std::vector<TokenSeq> outputs;
};

AggregateRun run_prompts(const Predictor& model, const std::vector<TokenSeq>& prompts,
                         const DraftSource* source, const GenerationConfig& config,
                         std::size_t max_tokens, const AcceleratorProfile& profile) {
    AggregateRun agg;
    bool first = true;
    for (const TokenSeq& prompt : prompts) {
        GenerationResult result = run_generation(model, prompt, max_tokens, source, config);
        const SimulatedCost cost =
            simulate_cost(result.metrics.trace, result.metrics.token_count, profile);
        agg.cost.baseline_seconds += cost.baseline_seconds;
        agg.cost.speculative_seconds += cost.speculative_seconds;
        if (first) {
            agg.metrics = std::move(result.metrics);
            first = false;
        } else {
            agg.metrics.merge(result.metrics);
        }
        agg.outputs.push_back(std::move(result.output));
    }
    return agg;
}

AcceleratorProfile profile_for(const CommonOptions& common) {
    if (common.profile_path.empty()) return default_profile();
    try {
        return load_profile(common.profile_path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
}

fs::path ensure_out_dir(const CommonOptions& common) {
    fs::path dir(common.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir.string());
    return dir;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(10) << v;
    return ss.str();
}

std::optional<Token> resolve_end_token(const Workbench& wb, const std::string& end_word,
                                       VocabMode mode) {
    if (end_word.empty()) return std::nullopt;
    if (mode != VocabMode::Word)
        throw ConfigError("--end-word needs --vocab-mode word");
    const auto id = wb.vocab.word_id(end_word);
    if (!id) throw ConfigError("end word '" + end_word + "' is not in the vocabulary");
    return id;
}

} // namespace

ModelSpec parse_model_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream ss(text);
    while (std::getline(ss, part, ':')) parts.push_back(part);

    ModelSpec spec;
    if (parts.size() == 2 && parts[0] == "table") {
        spec.kind = ModelSpec::Kind::Table;
        spec.order = parse_size(parts[1], "table order");
        if (spec.order < 1) throw ConfigError("table order must be at least 1");
        return spec;
    }
    if (parts.size() == 3 && parts[0] == "toy") {
        spec.kind = ModelSpec::Kind::Toy;
        spec.seed = parse_size(parts[1], "toy seed");
        spec.dim = parse_size(parts[2], "toy dim");
        if (spec.dim < 2) throw ConfigError("toy dim must be at least 2");
        return spec;
    }
    throw ConfigError("invalid model spec '" + text +
                      "' (expected table:<order> or toy:<seed>:<dim>)");
}

int cmd_derive(const DeriveOptions& options) {
    if (options.w_max < 1) throw ConfigError("w-max must be at least 1");
    if (options.top_k < 1) throw ConfigError("K must be at least 1");

    Workbench wb = prepare(options.common, 1, 0);
    if (options.top_k > wb.vocab.size())
        throw ConfigError("K (" + std::to_string(options.top_k) + ") exceeds vocabulary size (" +
                          std::to_string(wb.vocab.size()) + ")");

    const fs::path dir = ensure_out_dir(options.common);
    const BigramTable bigram = BigramTable::derive(*wb.model, options.top_k);
    const ExtendedBigramTable extended =
        ExtendedBigramTable::extend(*wb.model, bigram, options.w_max);

    bigram.save_file(dir / "bigram.ngtb");
    extended.save_file(dir / "extended.ngtb");
    if (const auto* toy = dynamic_cast<const ToyTransformer*>(wb.model.get()))
        toy->save_file(dir / "model.spdr");

    std::cout << "[derive] vocab=" << wb.vocab.size() << " K=" << options.top_k
              << " w_max=" << options.w_max << " out=" << dir.string() << "\n";
    return 0;
}

int cmd_run(const RunOptions& options) {
    if (options.max_tokens < 1) throw ConfigError("max-tokens must be at least 1");
    if (options.k < 1) throw ConfigError("k must be at least 1");
    if (options.q < 1) throw ConfigError("q must be at least 1");
    const StrategyKind kind = parse_strategy_or_throw(options.strategy);
    check_strategy_width(kind, options.w);

    Workbench wb = prepare(options.common, options.prompts, options.max_prompt_tokens);
    if (wb.prompts.empty()) throw ConfigError("no usable prompts in corpus");
    const AcceleratorProfile profile = profile_for(options.common);

    GenerationConfig config{options.k, options.w,
                            resolve_end_token(wb, options.end_word, options.common.vocab_mode)};

    Tables tables;
    std::unique_ptr<StrategySource> source;
    if (options.w > 0) {
        tables = derive_tables(kind, *wb.model, options.k, options.w,
                               parse_unigram_variant(options.unigram_variant));
        source = std::make_unique<StrategySource>(kind, options.q, tables.view(),
                                                  options.context_cap);
    }

    const auto started = std::chrono::steady_clock::now();
    AggregateRun agg =
        run_prompts(*wb.model, wb.prompts, source.get(), config, options.max_tokens, profile);
    const double host_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();

    const double sim_speedup = agg.cost.baseline_seconds / agg.cost.speculative_seconds;
    const fs::path dir = ensure_out_dir(options.common);
    write_text_file(dir / "metrics.json", metrics_to_json(agg.metrics));

    nlohmann::json summary;
    summary["strategy"] = options.strategy;
    summary["k"] = options.k;
    summary["w"] = options.w;
    summary["q"] = options.q;
    summary["seed"] = options.common.seed;
    summary["prompts"] = wb.prompts.size();
    summary["token_count"] = agg.metrics.token_count;
    summary["call_count"] = agg.metrics.call_count;
    summary["tokens_per_call"] = agg.metrics.tokens_per_call();
    summary["sim_speedup"] = sim_speedup;
    write_text_file(dir / "run_summary.json", summary.dump(2));

    std::string generations;
    for (std::size_t i = 0; i < agg.outputs.size(); ++i) {
        const TokenSeq& prompt = wb.prompts[i];
        TokenSeq continuation(agg.outputs[i].begin() + prompt.size(), agg.outputs[i].end());
        generations += "### prompt " + std::to_string(i) + "\n";
        generations += wb.vocab.detokenize(prompt) + "\n";
        generations += "### continuation\n";
        generations += wb.vocab.detokenize(continuation) + "\n";
    }
    write_text_file(dir / "generations.txt", generations);

    std::cout << "[run] strategy=" << options.strategy << " k=" << options.k
              << " w=" << options.w << " prompts=" << wb.prompts.size()
              << " tokens=" << agg.metrics.token_count << " calls=" << agg.metrics.call_count
              << " tok/call=" << format_double(agg.metrics.tokens_per_call())
              << " sim_speedup=" << format_double(sim_speedup)
              << " host_ms=" << format_double(host_ms) << "\n";
    return 0;
}

int cmd_sweep(const SweepOptions& options) {
    if (options.k_values.empty() || options.w_values.empty())
        throw ConfigError("sweep needs non-empty k and w value lists");
    if (options.max_tokens < 1) throw ConfigError("max-tokens must be at least 1");
    if (options.q < 1) throw ConfigError("q must be at least 1");
    const StrategyKind kind = parse_strategy_or_throw(options.strategy);
    for (std::size_t w : options.w_values) check_strategy_width(kind, w);
    for (std::size_t k : options.k_values)
        if (k < 1) throw ConfigError("k values must be at least 1");

    Workbench wb = prepare(options.common, options.prompts, options.max_prompt_tokens);
    if (wb.prompts.empty()) throw ConfigError("no usable prompts in corpus");
    const AcceleratorProfile profile = profile_for(options.common);

    const std::size_t max_k = *std::max_element(options.k_values.begin(), options.k_values.end());
    const std::size_t max_w = *std::max_element(options.w_values.begin(), options.w_values.end());
    const Tables tables = derive_tables(kind, *wb.model, max_k, max_w);

    struct Cell {
        std::size_t k, w;
        double tokens_per_call = 0.0;
        double sim_speedup = 0.0;
    };
    std::vector<Cell> cells;
    for (std::size_t k : options.k_values)
        for (std::size_t w : options.w_values) cells.push_back({k, w, 0.0, 0.0});

    // Cells are independent: one immutable model and table set, one session
    // per prompt per cell. Results land at fixed indices, so output order is
    // deterministic regardless of scheduling.
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(cells.size());
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                Cell& cell = cells[i];
                std::unique_ptr<StrategySource> source;
                if (cell.w > 0)
                    source = std::make_unique<StrategySource>(kind, options.q, tables.view(),
                                                              options.context_cap);
                const GenerationConfig config{cell.k, cell.w, std::nullopt};
                const AggregateRun agg = run_prompts(*wb.model, wb.prompts, source.get(), config,
                                                     options.max_tokens, profile);
                cell.tokens_per_call = agg.metrics.tokens_per_call();
                cell.sim_speedup = agg.cost.baseline_seconds / agg.cost.speculative_seconds;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t jobs = options.jobs ? options.jobs : std::thread::hardware_concurrency();
    jobs = std::max<std::size_t>(1, std::min(jobs, cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t best = 0;
    const Cell* reference = nullptr;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].sim_speedup > cells[best].sim_speedup) best = i;
        if (cells[i].k == 10 && cells[i].w == 10) reference = &cells[i];
    }

    const fs::path dir = ensure_out_dir(options.common);
    std::ostringstream csv;
    csv << "strategy,k,w,tokens_per_call,sim_speedup\n";
    for (const Cell& cell : cells)
        csv << options.strategy << ',' << cell.k << ',' << cell.w << ','
            << format_double(cell.tokens_per_call) << ',' << format_double(cell.sim_speedup)
            << '\n';
    write_text_file(dir / "sweep.csv", csv.str());

    nlohmann::json summary;
    summary["strategy"] = options.strategy;
    summary["rows"] = cells.size();
    summary["k_star"] = cells[best].k;
    summary["w_star"] = cells[best].w;
    summary["best_tokens_per_call"] = cells[best].tokens_per_call;
    summary["best_sim_speedup"] = cells[best].sim_speedup;
    if (reference) {
        summary["reference"] = {{"k", 10},
                                {"w", 10},
                                {"tokens_per_call", reference->tokens_per_call},
                                {"sim_speedup", reference->sim_speedup}};
    }
    write_text_file(dir / "sweep_summary.json", summary.dump(2));

    std::cout << "[sweep] strategy=" << options.strategy << " cells=" << cells.size()
              << " k*=" << cells[best].k << " w*=" << cells[best].w
              << " best_speedup=" << format_double(cells[best].sim_speedup);
    if (reference)
        std::cout << " ref(10,10)_speedup=" << format_double(reference->sim_speedup);
    std::cout << "\n";
    return 0;
}

int cmd_ablate(const AblateOptions& options) {
    if (options.k < 1 || options.w < 1)
        throw ConfigError("ablation needs k >= 1 and w >= 1");
    if (options.q < 1) throw ConfigError("q must be at least 1");
    if (options.max_tokens < 1) throw ConfigError("max-tokens must be at least 1");

    Workbench wb = prepare(options.common, options.prompts, options.max_prompt_tokens);
    if (wb.prompts.empty()) throw ConfigError("no usable prompts in corpus");
    const AcceleratorProfile profile = profile_for(options.common);

    const Tables tables = derive_tables(StrategyKind::Mixed, *wb.model, options.k, options.w);
    const StrategySource source(StrategyKind::Mixed, options.q, tables.view(),
                                options.context_cap);
    const GenerationConfig config{options.k, options.w, std::nullopt};
    const AggregateRun agg =
        run_prompts(*wb.model, wb.prompts, &source, config, options.max_tokens, profile);
    const RunMetrics& m = agg.metrics;

    const fs::path dir = ensure_out_dir(options.common);

    std::ostringstream acc;
    acc << "accepted_len,calls\n";
    for (std::size_t len = 0; len < m.acceptance_hist.size(); ++len)
        acc << len << ',' << m.acceptance_hist[len] << '\n';
    write_text_file(dir / "acceptance_length.csv", acc.str());

    std::ostringstream rank;
    rank << "rank,calls\n";
    if (m.rank_hist[0] > 0) rank << 0 << ',' << m.rank_hist[0] << '\n';
    for (std::size_t r = 1; r < m.rank_hist.size(); ++r)
        rank << r << ',' << m.rank_hist[r] << '\n';
    write_text_file(dir / "winner_rank.csv", rank.str());

    std::ostringstream alloc;
    alloc << "strategy,rows,calls\n";
    for (std::size_t s = 0; s < kDraftStrategyCount; ++s)
        for (std::size_t rows = 0; rows < m.allocation_hist[s].size(); ++rows)
            alloc << to_string(static_cast<DraftStrategy>(s)) << ',' << rows << ','
                  << m.allocation_hist[s][rows] << '\n';
    write_text_file(dir / "allocation.csv", alloc.str());

    std::cout << "[ablate] k=" << options.k << " w=" << options.w
              << " calls=" << m.call_count << " tokens=" << m.token_count
              << " tok/call=" << format_double(m.tokens_per_call()) << "\n";
    return 0;
}

int cmd_heatmap(const HeatmapOptions& options) {
    if (options.l_values.empty()) throw ConfigError("heatmap needs at least one context length");
    if (options.k_max < 1) throw ConfigError("k-max must be at least 1");
    const AcceleratorProfile profile = profile_for(options.common);

    std::vector<std::size_t> k_values, w_values;
    for (std::size_t k = 1; k <= options.k_max; ++k) k_values.push_back(k);
    for (std::size_t w = 0; w <= options.w_max; ++w) w_values.push_back(w);

    const fs::path dir = ensure_out_dir(options.common);
    for (std::size_t l : options.l_values) {
        if (l < 1) throw ConfigError("context lengths must be at least 1");
        const LatencyGrid grid = make_heatmap(profile, l, k_values, w_values);
        std::ostringstream csv;
        csv << std::setprecision(10);
        write_heatmap_csv(grid, csv);
        write_text_file(dir / ("heatmap_l" + std::to_string(l) + ".csv"), csv.str());
    }
    std::cout << "[heatmap] grids=" << options.l_values.size() << " k<=" << options.k_max
              << " w<=" << options.w_max << " out=" << dir.string() << "\n";
    return 0;
}

} // namespace specdec::cli
