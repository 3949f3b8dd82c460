#pragma once

#include "polarmin/batching.hpp"
#include "polarmin/rng.hpp"
#include "polarmin/vocab.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace polarmin {

// Dense row-major matrix of doubles. A bias vector is a 1 x n tensor.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::size_t size() const { return data.size(); }
    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

struct ModelConfig {
    std::size_t vocabSize = 0;
    std::size_t embedDim = 32;
    std::size_t hiddenDim = 64;
    std::size_t maxPositions = 256;
    std::size_t attentionHeads = 1; // single-head only
    bool tieOutputEmbedding = true;

    void validate() const; // throws ConfigError
    nlohmann::json toJson() const;
    static ModelConfig fromJson(const nlohmann::json& j);
};

// All learnable tensors of the encoder-decoder. Attention projections are
// embedDim x embedDim; the feed-forward expands to hiddenDim and back.
// outProj (vocabSize x embedDim) exists only when the output layer is untied.
struct TensorSet {
    Tensor embedding;                       // vocab x d
    Tensor encQ, encK, encV, encO;          // d x d each
    Tensor decQ, decK, decV, decO;          // d x d each
    Tensor crossQ, crossK, crossV, crossO;  // d x d each
    Tensor ffnW1; // h x d
    Tensor ffnB1; // 1 x h
    Tensor ffnW2; // d x h
    Tensor ffnB2; // 1 x d
    Tensor outProj; // vocab x d, or 0x0 when tied

    // Visits every tensor in a fixed declaration order; f(name, tensor).
    template <typename F> void forEach(F&& f) {
        f("embedding", embedding);
        f("encQ", encQ); f("encK", encK); f("encV", encV); f("encO", encO);
        f("decQ", decQ); f("decK", decK); f("decV", decV); f("decO", decO);
        f("crossQ", crossQ); f("crossK", crossK); f("crossV", crossV); f("crossO", crossO);
        f("ffnW1", ffnW1); f("ffnB1", ffnB1); f("ffnW2", ffnW2); f("ffnB2", ffnB2);
        f("outProj", outProj);
    }
    template <typename F> void forEach(F&& f) const {
        const_cast<TensorSet*>(this)->forEach([&](const char* name, Tensor& t) {
            f(name, static_cast<const Tensor&>(t));
        });
    }
};

// Pairwise visit of two shape-identical tensor sets by name.
template <typename F> void forEachPair(TensorSet& a, const TensorSet& b, F&& f) {
    a.forEach([&](const char* name, Tensor& ta) {
        b.forEach([&](const char* other, const Tensor& tb) {
            if (std::string_view(name) == std::string_view(other)) f(name, ta, tb);
        });
    });
}

// Parameters plus the non-learned sinusoidal position table.
struct ModelParams {
    ModelConfig config;
    TensorSet tensors;
    Tensor positions; // maxPositions x d, fixed

    const Tensor& outputMatrix() const {
        return config.tieOutputEmbedding ? tensors.embedding : tensors.outProj;
    }
};

// Zero-filled tensors with the same shapes as the model's learnables.
TensorSet zerosLike(const TensorSet& like);

// Weight matrices uniform in [-0.08, 0.08] from the stream, biases zero.
ModelParams initModel(const ModelConfig& config, Rng& rng);

// Per-position target log-probabilities for one example: entry j is
// log p(target[j+1] | target[..j], input). Size is targetLen - 1.
std::vector<double> forwardLogprobs(const ModelParams& params,
                                    const std::vector<int>& inputIds,
                                    const std::vector<int>& targetIds);

enum class LossNorm { PerToken, PerExample };

struct LossResult {
    double loss = 0.0;           // normalized per LossNorm
    double totalNll = 0.0;       // summed over all predicted positions
    std::size_t tokenCount = 0;  // predicted positions in the batch
    std::size_t exampleCount = 0;
};

// Forward-only batch NLL (no gradients). PAD rows are sliced off per example
// before any arithmetic, so padding never changes the result.
LossResult batchLoss(const ModelParams& params, const Batch& batch, LossNorm norm);

// Batch NLL plus gradients accumulated into grads (which must be zerosLike
// shaped; contents are added to, not overwritten).
LossResult batchLossGrad(const ModelParams& params, const Batch& batch,
                         LossNorm norm, TensorSet& grads);

// Argmax decode (ties break toward the lowest token id). Starts from BOS,
// stops at EOS or maxLen emitted tokens; the returned ids carry no BOS/EOS.
std::vector<int> greedyDecode(const ModelParams& params,
                              const std::vector<int>& inputIds,
                              std::size_t maxLen);

struct AdamHyper {
    double lr = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    nlohmann::json toJson() const;
    static AdamHyper fromJson(const nlohmann::json& j);
};

struct AdamState {
    TensorSet m;
    TensorSet v;
    std::uint64_t step = 0;
};

AdamState makeAdamState(const TensorSet& like);

// One bias-corrected Adam update. Throws DataError on non-finite gradients
// (fail fast rather than silently poisoning the parameters).
void adamStep(TensorSet& params, const TensorSet& grads, AdamState& state,
              const AdamHyper& hyper);

// ---- checkpoint io ------------------------------------------------------

struct Checkpoint {
    ModelParams params;
    AdamState adam;
    bool hasAdamState = false;
    std::uint64_t masterSeed = 0;
    Vocab vocab = Vocab::fromTokenList({});
    nlohmann::json meta; // decode-time settings (titles, norm, lengths)
};

// Binary container: magic, JSON header (config, vocab, tensor directory),
// then raw little-endian doubles. Loading restores bit-identical parameters.
void saveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint loadCheckpoint(const std::string& path);

} // namespace polarmin
