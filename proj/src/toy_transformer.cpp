#include "specdec/toy_transformer.hpp"

#include "specdec/io.hpp"
#include "specdec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace specdec {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'D', 'R'};

void fill_uniform(Rng& rng, double bound, std::vector<double>& data) {
    for (double& x : data) x = rng.uniform(-bound, bound);
}

} // namespace

ToyTransformer::ToyTransformer(std::uint64_t seed, std::size_t vocab_size, std::size_t dim) {
    if (vocab_size < 2) throw std::invalid_argument("vocab size must be at least 2");
    if (vocab_size > kMaxVocab) throw std::invalid_argument("vocab size exceeds maximum");
    if (dim < 2) throw std::invalid_argument("dim must be at least 2");

    seed_ = seed;
    vocab_size_ = vocab_size;
    dim_ = dim;
    const std::size_t hidden = hidden_dim();

    v_ = Matrix(vocab_size, dim);
    wq_ = Matrix(dim, dim);
    wk_ = Matrix(dim, dim);
    wv_ = Matrix(dim, dim);
    wo_ = Matrix(dim, dim);
    w1_ = Matrix(hidden, dim);
    b1_.assign(hidden, 0.0);
    w2_ = Matrix(dim, hidden);
    b2_.assign(dim, 0.0);
    u_ = Matrix(vocab_size, dim);

    Rng rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    fill_uniform(rng, bound, v_.data());
    fill_uniform(rng, bound, wq_.data());
    fill_uniform(rng, bound, wk_.data());
    fill_uniform(rng, bound, wv_.data());
    fill_uniform(rng, bound, wo_.data());
    fill_uniform(rng, bound, w1_.data());
    fill_uniform(rng, bound, b1_);
    fill_uniform(rng, bound, w2_.data());
    fill_uniform(rng, bound, b2_);
    fill_uniform(rng, bound, u_.data());
}

void ToyTransformer::embed(Token token, std::size_t pos, double* out) const {
    const double* row = v_.row(token);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    for (std::size_t i = 0; i < dim_; ++i) {
        const double angle = static_cast<double>(pos) /
                             std::pow(10000.0, static_cast<double>(i - (i % 2)) /
                                                   static_cast<double>(dim_));
        const double pe = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        out[i] = row[i] + scale * pe;
    }
}

void ToyTransformer::matvec(const Matrix& w, const double* x, double* out) const {
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const double* row = w.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < w.cols(); ++j) acc += row[j] * x[j];
        out[i] = acc;
    }
}

PredictorOutput ToyTransformer::forward_greedy(const TokenRows& rows, std::size_t n_outputs,
                                               KvCache* cache, bool want_scores) const {
    detail::validate_forward(rows, vocab_size_, n_outputs, cache);
    const std::size_t len = rows[0].size();
    const std::size_t first_out = len - n_outputs;
    const std::size_t committed = cache ? cache->committed_len() : 0;
    const std::size_t hidden = hidden_dim();
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dim_));

    if (cache) cache->begin_step(len - committed);

    PredictorOutput out;
    out.rows = rows.size();
    out.cols = n_outputs;
    out.greedy.resize(out.rows * out.cols);
    if (want_scores) out.scores.resize(out.rows * out.cols);

    std::vector<double> x(dim_), q(dim_), attn(dim_), proj(dim_);
    std::vector<double> h1(dim_), h2(dim_), act(hidden), ff(dim_);
    std::vector<double> scores;
    std::vector<double> local_keys((len - committed) * dim_);
    std::vector<double> local_values((len - committed) * dim_);

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const TokenSeq& row = rows[r];

        // Keys/values for the positions not covered by the cache.
        for (std::size_t p = committed; p < len; ++p) {
            embed(row[p], p, x.data());
            double* k = local_keys.data() + (p - committed) * dim_;
            double* v = local_values.data() + (p - committed) * dim_;
            matvec(wk_, x.data(), k);
            matvec(wv_, x.data(), v);
            if (cache)
                cache->set_spec(r, p - committed, row[p], {k, dim_}, {v, dim_});
        }
        auto key_at = [&](std::size_t p) -> const double* {
            return p < committed ? cache->committed_key(p).data()
                                 : local_keys.data() + (p - committed) * dim_;
        };
        auto value_at = [&](std::size_t p) -> const double* {
            return p < committed ? cache->committed_value(p).data()
                                 : local_values.data() + (p - committed) * dim_;
        };

        for (std::size_t t = 0; t < n_outputs; ++t) {
            const std::size_t p = first_out + t;
            embed(row[p], p, x.data());
            matvec(wq_, x.data(), q.data());

            // Causal attention over positions 0..p, numerically stable softmax.
            scores.assign(p + 1, 0.0);
            double max_score = -1e300;
            for (std::size_t s = 0; s <= p; ++s) {
                const double* k = key_at(s);
                double acc = 0.0;
                for (std::size_t i = 0; i < dim_; ++i) acc += q[i] * k[i];
                scores[s] = acc * inv_sqrt_d;
                max_score = std::max(max_score, scores[s]);
            }
            double z = 0.0;
            for (std::size_t s = 0; s <= p; ++s) {
                scores[s] = std::exp(scores[s] - max_score);
                z += scores[s];
            }
            std::fill(attn.begin(), attn.end(), 0.0);
            for (std::size_t s = 0; s <= p; ++s) {
                const double w = scores[s] / z;
                const double* v = value_at(s);
                for (std::size_t i = 0; i < dim_; ++i) attn[i] += w * v[i];
            }
            matvec(wo_, attn.data(), proj.data());
            for (std::size_t i = 0; i < dim_; ++i) h1[i] = x[i] + proj[i];

            // Feedforward with residual.
            matvec(w1_, h1.data(), act.data());
            for (std::size_t i = 0; i < hidden; ++i) act[i] = std::max(0.0, act[i] + b1_[i]);
            matvec(w2_, act.data(), ff.data());
            for (std::size_t i = 0; i < dim_; ++i) h2[i] = h1[i] + ff[i] + b2_[i];

            // Logits against the output embedding rows; lowest id wins ties.
            Token best = 0;
            double best_logit = -1e300;
            std::vector<double>* score_row = nullptr;
            if (want_scores) {
                out.scores[r * n_outputs + t].assign(vocab_size_, 0.0);
                score_row = &out.scores[r * n_outputs + t];
            }
            for (std::size_t tok = 0; tok < vocab_size_; ++tok) {
                const double* urow = u_.row(tok);
                double logit = 0.0;
                for (std::size_t i = 0; i < dim_; ++i) logit += urow[i] * h2[i];
                if (score_row) (*score_row)[tok] = logit;
                if (logit > best_logit) {
                    best_logit = logit;
                    best = static_cast<Token>(tok);
                }
            }
            out.greedy[r * n_outputs + t] = best;
        }
    }
    return out;
}

void ToyTransformer::save(std::ostream& os) const {
    os.write(kMagic, 4);
    io::write_u32(os, kFileVersion);
    io::write_u32(os, static_cast<std::uint32_t>(vocab_size_));
    io::write_u32(os, static_cast<std::uint32_t>(dim_));
    io::write_u64(os, seed_);
    auto dump = [&](const std::vector<double>& data) {
        for (double x : data) io::write_f64(os, x);
    };
    dump(v_.data());
    dump(wq_.data());
    dump(wk_.data());
    dump(wv_.data());
    dump(wo_.data());
    dump(w1_.data());
    dump(b1_);
    dump(w2_.data());
    dump(b2_);
    dump(u_.data());
    if (!os) throw std::runtime_error("failed to write model file");
}

void ToyTransformer::save_file(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open model file for writing: " + path.string());
    save(os);
}

ToyTransformer ToyTransformer::load(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
        throw std::runtime_error("not a model weight file");
    const std::uint32_t version = io::read_u32(is);
    if (version != kFileVersion) throw std::runtime_error("unsupported model file version");
    const std::size_t vocab = io::read_u32(is);
    const std::size_t dim = io::read_u32(is);
    const std::uint64_t seed = io::read_u64(is);
    if (vocab < 2 || vocab > kMaxVocab || dim < 2)
        throw std::runtime_error("model file header out of range");

    ToyTransformer m;
    m.seed_ = seed;
    m.vocab_size_ = vocab;
    m.dim_ = dim;
    const std::size_t hidden = 4 * dim;
    m.v_ = Matrix(vocab, dim);
    m.wq_ = Matrix(dim, dim);
    m.wk_ = Matrix(dim, dim);
    m.wv_ = Matrix(dim, dim);
    m.wo_ = Matrix(dim, dim);
    m.w1_ = Matrix(hidden, dim);
    m.b1_.assign(hidden, 0.0);
    m.w2_ = Matrix(dim, hidden);
    m.b2_.assign(dim, 0.0);
    m.u_ = Matrix(vocab, dim);
    auto slurp = [&](std::vector<double>& data) {
        for (double& x : data) x = io::read_f64(is);
    };
    slurp(m.v_.data());
    slurp(m.wq_.data());
    slurp(m.wk_.data());
    slurp(m.wv_.data());
    slurp(m.wo_.data());
    slurp(m.w1_.data());
    slurp(m.b1_);
    slurp(m.w2_.data());
    slurp(m.b2_);
    slurp(m.u_.data());
    return m;
}

ToyTransformer ToyTransformer::load_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open model file: " + path.string());
    return load(is);
}

} // namespace specdec
