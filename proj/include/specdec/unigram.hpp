#pragma once

#include "specdec/matrix.hpp"
#include "specdec/predictor.hpp"
#include "specdec/token.hpp"

#include <vector>

namespace specdec {

enum class UnigramVariant {
    /// d(x) = sqrt((u_x - mean_u)^T C (u_x - mean_u)) with C = V^T V / |vocab|.
    CenteredNorm,
    /// Signed score mean_u^T C u_x, ranked ascending (uncentered comparison
    /// variant; values may be negative).
    SignedInner,
};

/// Whole-vocabulary ranking by distance of each output embedding from the
/// mean output embedding, measured in the metric induced by the input
/// embedding covariance. Smaller distance ranks earlier; ties break toward
/// the lower token id.
struct UnigramRanking {
    std::vector<Token> ranking;    // permutation of [0, vocab)
    std::vector<double> distances; // indexed by token id
};

UnigramRanking derive_unigram(const Matrix& input_embeddings, const Matrix& output_rows,
                              UnigramVariant variant = UnigramVariant::CenteredNorm);

/// Convenience overload; throws std::logic_error for predictors without
/// embeddings (e.g. table models).
UnigramRanking derive_unigram(const Predictor& model,
                              UnigramVariant variant = UnigramVariant::CenteredNorm);

/// First k tokens of the ranking (one single-token speculation row each).
std::vector<Token> unigram_topk(const UnigramRanking& ranking, std::size_t k);

} // namespace specdec
