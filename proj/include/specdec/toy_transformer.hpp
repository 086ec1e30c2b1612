#pragma once

#include "specdec/predictor.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace specdec {

/// Tiny deterministic decoder: one causal single-head attention layer and one
/// two-layer ReLU feedforward, both with residual connections, over learned
/// token embeddings plus a fixed sinusoidal position signal (scaled by
/// 1/sqrt(dim) to match the embedding magnitude). All arithmetic is double
/// precision and fully deterministic, so cached and uncached forwards agree
/// bitwise.
///
/// Weights are drawn uniformly from [-1/sqrt(dim), 1/sqrt(dim)] using the
/// seeded generator, in a fixed order: V, Wq, Wk, Wv, Wo, W1, b1, W2, b2, U.
/// The hidden feedforward width is fixed at 4*dim. Input embeddings V and
/// output embedding rows U are exposed for table derivation.
class ToyTransformer final : public Predictor {
public:
    static constexpr std::size_t kMaxVocab = 512;
    static constexpr std::uint32_t kFileVersion = 1;

    ToyTransformer(std::uint64_t seed, std::size_t vocab_size, std::size_t dim);

    std::uint64_t seed() const { return seed_; }
    std::size_t dim() const { return dim_; }
    std::size_t hidden_dim() const { return 4 * dim_; }

    std::size_t vocab_size() const override { return vocab_size_; }
    std::size_t cache_dim() const override { return dim_; }
    PredictorOutput forward_greedy(const TokenRows& rows, std::size_t n_outputs,
                                   KvCache* cache = nullptr,
                                   bool want_scores = false) const override;

    bool has_embeddings() const override { return true; }
    const Matrix& input_embeddings() const override { return v_; }
    const Matrix& output_embedding_rows() const override { return u_; }

    // Flat binary weight file: "SPDR" magic, version, vocab, dim, seed, then
    // row-major little-endian f64 matrices in the initialization order above.
    void save(std::ostream& os) const;
    void save_file(const std::filesystem::path& path) const;
    static ToyTransformer load(std::istream& is);
    static ToyTransformer load_file(const std::filesystem::path& path);

    bool operator==(const ToyTransformer& other) const {
        return seed_ == other.seed_ && vocab_size_ == other.vocab_size_ && dim_ == other.dim_ &&
               v_ == other.v_ && wq_ == other.wq_ && wk_ == other.wk_ && wv_ == other.wv_ &&
               wo_ == other.wo_ && w1_ == other.w1_ && b1_ == other.b1_ && w2_ == other.w2_ &&
               b2_ == other.b2_ && u_ == other.u_;
    }

private:
    ToyTransformer() = default;

    void embed(Token token, std::size_t pos, double* out) const;
    void matvec(const Matrix& w, const double* x, double* out) const;

    std::uint64_t seed_ = 0;
    std::size_t vocab_size_ = 0;
    std::size_t dim_ = 0;
    Matrix v_;                     // vocab x dim
    Matrix wq_, wk_, wv_, wo_;     // dim x dim
    Matrix w1_;                    // hidden x dim
    std::vector<double> b1_;       // hidden
    Matrix w2_;                    // dim x hidden
    std::vector<double> b2_;       // dim
    Matrix u_;                     // vocab x dim
};

} // namespace specdec
