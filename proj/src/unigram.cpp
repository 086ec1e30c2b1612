#include "specdec/unigram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace specdec {

namespace {

// C = V^T V / |vocab|, dim x dim.
Matrix covariance(const Matrix& v) {
    const std::size_t n = v.rows();
    const std::size_t d = v.cols();
    Matrix c(d, d);
    for (std::size_t x = 0; x < n; ++x) {
        const double* row = v.row(x);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                c.at(i, j) += row[i] * row[j];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& e : c.data()) e *= inv_n;
    return c;
}

} // namespace

UnigramRanking derive_unigram(const Matrix& input_embeddings, const Matrix& output_rows,
                              UnigramVariant variant) {
    const std::size_t n = output_rows.rows();
    const std::size_t d = output_rows.cols();
    if (n == 0 || d == 0) throw std::invalid_argument("empty embedding matrix");
    if (input_embeddings.rows() != n || input_embeddings.cols() != d)
        throw std::invalid_argument("embedding dimension mismatch");

    const Matrix c = covariance(input_embeddings);

    std::vector<double> mean(d, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        const double* row = output_rows.row(x);
        for (std::size_t i = 0; i < d; ++i) mean[i] += row[i];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    UnigramRanking result;
    result.distances.resize(n);
    std::vector<double> y(d), cy(d);
    if (variant == UnigramVariant::CenteredNorm) {
        for (std::size_t x = 0; x < n; ++x) {
            const double* row = output_rows.row(x);
            for (std::size_t i = 0; i < d; ++i) y[i] = row[i] - mean[i];
            for (std::size_t i = 0; i < d; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += c.at(i, j) * y[j];
                cy[i] = acc;
            }
            double sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) sq += y[i] * cy[i];
            result.distances[x] = std::sqrt(std::max(0.0, sq));
        }
    } else {
        // score_x = mean^T C u_x; precompute w = C^T mean (C is symmetric).
        std::vector<double> w(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += c.at(j, i) * mean[j];
            w[i] = acc;
        }
        for (std::size_t x = 0; x < n; ++x) {
            const double* row = output_rows.row(x);
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i) acc += w[i] * row[i];
            result.distances[x] = acc;
        }
    }

    result.ranking.resize(n);
    std::iota(result.ranking.begin(), result.ranking.end(), Token{0});
    std::sort(result.ranking.begin(), result.ranking.end(), [&](Token a, Token b) {
        if (result.distances[a] != result.distances[b])
            return result.distances[a] < result.distances[b];
        return a < b;
    });
    return result;
}

UnigramRanking derive_unigram(const Predictor& model, UnigramVariant variant) {
    if (!model.has_embeddings())
        throw std::logic_error("unigram derivation needs a model with embeddings");
    return derive_unigram(model.input_embeddings(), model.output_embedding_rows(), variant);
}

std::vector<Token> unigram_topk(const UnigramRanking& ranking, std::size_t k) {
    if (k > ranking.ranking.size())
        throw std::invalid_argument("k exceeds vocabulary size");
    return {ranking.ranking.begin(), ranking.ranking.begin() + k};
}

} // namespace specdec
