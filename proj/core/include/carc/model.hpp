#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <carc/grid.hpp>
#include <carc/rng.hpp>
#include <carc/tokenizer.hpp>

namespace carc {

// Encoder-decoder sizes. The defaults land at about 5.64M trainable
// parameters with untied embedding tables.
struct ModelConfig {
    int vocab = kVocabSize;
    int enc_layers = 3;
    int dec_layers = 3;
    int heads = 8;
    int embed_dim = 128;
    int feedforward_dim = 768;
    int max_pairs = 13;              // twelve study pairs plus the query slot
    int max_target = kTargetLength;  // SOS + 25 patches + EOS
    // One table shared by encoder input, decoder input, and output projection
    // instead of three separate ones.
    bool tied_embeddings = false;
    // Adds an input/output/separator cue to the source embedding, for probing
    // whether pair order alone suffices.
    bool role_embeddings = false;

    bool operator==(const ModelConfig&) const = default;
};

// Weighted token-level cross-entropy: sum(w * ce) / sum(w). logits rows are
// positions, labels index the vocabulary, weights match labels in length.
template <typename Scalar>
Scalar sequence_loss(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& logits,
    const std::vector<int>& labels, const std::vector<Scalar>& weights);

// Per-position loss weights for a target sequence (SOS, patches, EOS): the
// all-background patch gets background_weight, everything else 1. Weights
// align with the predicted positions target[1..].
template <typename Scalar>
std::vector<Scalar> target_weights(const std::vector<int>& target, Scalar background_weight);

// Loss pieces of one item: the weighted cross-entropy sum and the weight sum,
// kept separate so a batch can be averaged as one weighted mean.
template <typename Scalar>
struct ItemLoss {
    Scalar weighted = 0;
    Scalar weight = 0;
};

// Transformer encoder-decoder over patch-token sequences, written against
// Eigen with explicit gradients so training needs no framework. All
// parameters live in one flat vector; gradients accumulate into a parallel
// vector until the caller consumes them.
template <typename Scalar>
class Transformer {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit Transformer(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    int64_t parameter_count() const { return params_.size(); }

    // Embeddings and projections drawn from N(0, 0.02); gains 1, biases 0.
    void init_weights(Rng& rng);

    Vector& parameters() { return params_; }
    const Vector& parameters() const { return params_; }
    Vector& gradients() { return grads_; }
    const Vector& gradients() const { return grads_; }
    void zero_gradients() { grads_.setZero(); }

    // Probability of each vocabulary entry at every predicted position
    // (rows: target positions 1..; columns: vocabulary).
    Matrix forward(const TokenSeq& item) const;

    // Forward pass returning the item's loss pieces at background_weight.
    ItemLoss<Scalar> evaluate(const TokenSeq& item, Scalar background_weight) const;

    // evaluate() plus gradient accumulation. Gradients are of the weighted
    // cross-entropy SUM; divide by the accumulated weight for the mean.
    ItemLoss<Scalar> accumulate(const TokenSeq& item, Scalar background_weight);

    // Argmax decoding from SOS until EOS or a full grid of patches. Early EOS
    // or a non-patch token decodes to nothing, which scoring treats as a
    // format failure rather than an exception.
    std::optional<Grid> greedy_decode(const std::vector<SourceToken>& source) const;

    // Tensor layout of the flat parameter vector, in storage order.
    struct TensorInfo {
        std::string name;
        int rows = 0;
        int cols = 0;
        int64_t offset = 0;
    };
    const std::vector<TensorInfo>& tensors() const { return tensors_; }

    // View of one named tensor inside a flat vector (parameters or gradients).
    Eigen::Map<Matrix> tensor(Vector& flat, const std::string& name) const;
    Eigen::Map<const Matrix> tensor(const Vector& flat, const std::string& name) const;

private:
    void register_tensors();
    size_t tensor_index(const std::string& name) const;

    ModelConfig config_;
    std::vector<TensorInfo> tensors_;
    std::vector<std::pair<std::string, size_t>> index_;  // sorted name -> tensor position
    Vector params_;
    Vector grads_;
};

extern template class Transformer<float>;
extern template class Transformer<double>;
extern template float sequence_loss<float>(
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>&,
    const std::vector<int>&, const std::vector<float>&);
extern template double sequence_loss<double>(
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>&,
    const std::vector<int>&, const std::vector<double>&);
extern template std::vector<float> target_weights<float>(const std::vector<int>&, float);
extern template std::vector<double> target_weights<double>(const std::vector<int>&, double);

}  // namespace carc
