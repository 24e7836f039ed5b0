#include <carc/train.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <carc/errors.hpp>
#include <carc/rng.hpp>

namespace carc {

namespace {

constexpr uint64_t kCheckpointMagic = 0x314c444d43524143ull;  // "CARCMDL1"
constexpr uint32_t kCheckpointVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(value));
    if (!in) throw IoError("checkpoint ends early");
    return value;
}

void write_floats(std::ostream& out, const Eigen::VectorXf& values) {
    write_pod<uint64_t>(out, static_cast<uint64_t>(values.size()));
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(sizeof(float) * static_cast<size_t>(values.size())));
}

Eigen::VectorXf read_floats(std::istream& in) {
    auto n = read_pod<uint64_t>(in);
    Eigen::VectorXf values(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(sizeof(float) * n));
    if (!in) throw IoError("checkpoint ends early");
    return values;
}

void write_model_config(std::ostream& out, const ModelConfig& config) {
    write_pod<int32_t>(out, config.vocab);
    write_pod<int32_t>(out, config.enc_layers);
    write_pod<int32_t>(out, config.dec_layers);
    write_pod<int32_t>(out, config.heads);
    write_pod<int32_t>(out, config.embed_dim);
    write_pod<int32_t>(out, config.feedforward_dim);
    write_pod<int32_t>(out, config.max_pairs);
    write_pod<int32_t>(out, config.max_target);
    write_pod<uint8_t>(out, config.tied_embeddings ? 1 : 0);
    write_pod<uint8_t>(out, config.role_embeddings ? 1 : 0);
}

ModelConfig read_model_config(std::istream& in) {
    ModelConfig config;
    config.vocab = read_pod<int32_t>(in);
    config.enc_layers = read_pod<int32_t>(in);
    config.dec_layers = read_pod<int32_t>(in);
    config.heads = read_pod<int32_t>(in);
    config.embed_dim = read_pod<int32_t>(in);
    config.feedforward_dim = read_pod<int32_t>(in);
    config.max_pairs = read_pod<int32_t>(in);
    config.max_target = read_pod<int32_t>(in);
    config.tied_embeddings = read_pod<uint8_t>(in) != 0;
    config.role_embeddings = read_pod<uint8_t>(in) != 0;
    return config;
}

void write_train_config(std::ostream& out, const TrainConfig& config) {
    write_pod<int32_t>(out, config.epochs);
    write_pod<int32_t>(out, config.batch_episodes);
    write_pod<int32_t>(out, config.grad_accumulation);
    write_pod<int32_t>(out, config.eval_every);
    write_pod<double>(out, config.peak_lr);
    write_pod<double>(out, config.warmup_start_lr);
    write_pod<double>(out, config.final_lr);
    write_pod<double>(out, config.weight_decay);
    write_pod<double>(out, config.noise_prob);
    write_pod<double>(out, config.background_weight);
    write_pod<uint8_t>(out, config.copy_task ? 1 : 0);
    write_pod<uint64_t>(out, config.seed);
}

TrainConfig read_train_config(std::istream& in) {
    TrainConfig config;
    config.epochs = read_pod<int32_t>(in);
    config.batch_episodes = read_pod<int32_t>(in);
    config.grad_accumulation = read_pod<int32_t>(in);
    config.eval_every = read_pod<int32_t>(in);
    config.peak_lr = read_pod<double>(in);
    config.warmup_start_lr = read_pod<double>(in);
    config.final_lr = read_pod<double>(in);
    config.weight_decay = read_pod<double>(in);
    config.noise_prob = read_pod<double>(in);
    config.background_weight = read_pod<double>(in);
    config.copy_task = read_pod<uint8_t>(in) != 0;
    config.seed = read_pod<uint64_t>(in);
    return config;
}

// Replaces the target patches with a noised rendering of the same grid.
void noise_target(TokenSeq& item, Rng& rng, double p) {
    std::vector<int> patches(item.target.begin() + 1, item.target.end() - 1);
    Grid noisy = apply_noise(grid_from_tokens(patches), rng, p);
    std::vector<int> target;
    target.reserve(item.target.size());
    target.push_back(kSos);
    std::vector<int> tokens = grid_tokens(noisy);
    target.insert(target.end(), tokens.begin(), tokens.end());
    target.push_back(kEos);
    item.target = std::move(target);
}

}  // namespace

double scheduled_lr(const TrainConfig& config, int64_t step, int64_t steps_per_epoch,
                    int64_t total_steps) {
    assert(step >= 0 && step < total_steps && steps_per_epoch > 0);
    if (step < steps_per_epoch) {
        double frac = double(step + 1) / double(steps_per_epoch);
        return config.warmup_start_lr + (config.peak_lr - config.warmup_start_lr) * frac;
    }
    if (total_steps <= steps_per_epoch) return config.peak_lr;
    double frac = double(step - steps_per_epoch + 1) / double(total_steps - steps_per_epoch);
    return config.peak_lr + (config.final_lr - config.peak_lr) * std::min(1.0, frac);
}

void adam_step(Transformer<float>& model, AdamState& state, const Eigen::VectorXf& gradient,
               double lr, double weight_decay) {
    Eigen::VectorXf& params = model.parameters();
    assert(state.m.size() == params.size() && gradient.size() == params.size());
    ++state.t;
    const float b1 = float(state.beta1);
    const float b2 = float(state.beta2);
    state.m = b1 * state.m + (1.0f - b1) * gradient;
    state.v.array() = b2 * state.v.array() + (1.0f - b2) * gradient.array().square();
    const float correct1 = float(1.0 - std::pow(state.beta1, double(state.t)));
    const float correct2 = float(1.0 - std::pow(state.beta2, double(state.t)));
    params.array() -= float(lr * weight_decay) * params.array();
    params.array() -= float(lr) * (state.m.array() / correct1) /
                      ((state.v.array() / correct2).sqrt() + float(state.epsilon));
}

EvalReport evaluate_model(const Transformer<float>& model, const std::vector<Episode>& episodes) {
    std::vector<PredictionRecord> predictions;
    for (const Episode& episode : episodes) {
        for (int q = 0; q < int(episode.queries.size()); ++q) {
            TokenSeq item = tokenize_episode(episode, q, false).front();
            predictions.push_back({episode.id, q, model.greedy_decode(item.source)});
        }
    }
    return score_predictions(episodes, predictions, FormatPolicy::count_as_zero);
}

std::vector<EpochRecord> train_model(Transformer<float>& model, AdamState& adam,
                                     const TrainConfig& config,
                                     const std::vector<Episode>& train_episodes,
                                     const std::vector<Episode>& val_episodes, int start_epoch,
                                     int stop_epoch, std::ostream* log) {
    if (config.epochs <= 0 || config.batch_episodes <= 0 || config.grad_accumulation <= 0)
        throw UsageError("training needs positive epochs, batch size, and accumulation");
    if (train_episodes.empty()) throw UsageError("no training episodes");
    if (stop_epoch < 0) stop_epoch = config.epochs;
    if (start_epoch < 0 || start_epoch > stop_epoch || stop_epoch > config.epochs)
        throw UsageError("epoch range outside the configured run");
    if (adam.m.size() != model.parameters().size())
        throw UsageError("optimizer state does not match the model");

    const int64_t n = int64_t(train_episodes.size());
    const int64_t steps_per_epoch = (n + config.batch_episodes - 1) / config.batch_episodes;
    const int64_t total_steps = steps_per_epoch * config.epochs;
    std::vector<EpochRecord> records;

    for (int epoch = start_epoch; epoch < stop_epoch; ++epoch) {
        Rng rng(derive_seed(config.seed, uint64_t(epoch)));
        std::vector<size_t> order(train_episodes.size());
        std::iota(order.begin(), order.end(), size_t(0));
        rng.shuffle(order);

        double epoch_weighted = 0, epoch_weight = 0;
        int64_t step = int64_t(epoch) * steps_per_epoch;
        for (int64_t start = 0; start < n; start += config.batch_episodes, ++step) {
            model.zero_gradients();
            double batch_weighted = 0, batch_weight = 0;
            const int64_t stop = std::min(n, start + config.batch_episodes);
            for (int64_t b = start; b < stop; ++b) {
                const Episode& episode = train_episodes[order[size_t(b)]];
                for (int q = 0; q < int(episode.queries.size()); ++q) {
                    for (TokenSeq& item : tokenize_episode(episode, q, config.copy_task)) {
                        if (config.noise_prob > 0) noise_target(item, rng, config.noise_prob);
                        ItemLoss<float> loss =
                            model.accumulate(item, float(config.background_weight));
                        batch_weighted += loss.weighted;
                        batch_weight += loss.weight;
                    }
                }
            }
            if (!std::isfinite(batch_weighted) || batch_weight <= 0)
                throw NonFiniteLoss("loss left the reals at epoch " + std::to_string(epoch + 1) +
                                    ", step " + std::to_string(step + 1) + " (weighted sum " +
                                    std::to_string(batch_weighted) + ")");
            Eigen::VectorXf gradient = model.gradients() / float(batch_weight);
            adam_step(model, adam, gradient, scheduled_lr(config, step, steps_per_epoch, total_steps),
                      config.weight_decay);
            epoch_weighted += batch_weighted;
            epoch_weight += batch_weight;
        }

        EpochRecord record;
        record.epoch = epoch + 1;
        record.train_loss = epoch_weighted / epoch_weight;
        const bool last = epoch + 1 == config.epochs;
        if (!val_episodes.empty() && config.eval_every > 0 &&
            ((epoch + 1) % config.eval_every == 0 || last)) {
            EvalReport report = evaluate_model(model, val_episodes);
            record.val_exact = report.exact_match;
            record.val_color = report.color_acc;
            record.val_shape = report.shape_acc;
        }
        if (log) {
            *log << "epoch " << record.epoch << " train_loss " << record.train_loss;
            if (record.val_exact >= 0)
                *log << " val_exact " << record.val_exact << " val_color " << record.val_color
                     << " val_shape " << record.val_shape;
            *log << '\n';
        }
        records.push_back(record);
    }
    return records;
}

void save_checkpoint(const std::string& path, const Transformer<float>& model,
                     const AdamState& adam, const TrainConfig& config, int epochs_done) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    write_pod<uint64_t>(out, kCheckpointMagic);
    write_pod<uint32_t>(out, kCheckpointVersion);
    write_model_config(out, model.config());
    write_train_config(out, config);
    write_pod<int32_t>(out, epochs_done);
    write_pod<uint64_t>(out, derive_seed(config.seed, uint64_t(epochs_done)));
    write_pod<double>(out, adam.beta1);
    write_pod<double>(out, adam.beta2);
    write_pod<double>(out, adam.epsilon);
    write_pod<int64_t>(out, adam.t);
    write_floats(out, model.parameters());
    write_floats(out, adam.m);
    write_floats(out, adam.v);
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    if (read_pod<uint64_t>(in) != kCheckpointMagic)
        throw IoError("not a model checkpoint: " + path);
    if (auto version = read_pod<uint32_t>(in); version != kCheckpointVersion)
        throw IoError("unsupported checkpoint version " + std::to_string(version));
    Checkpoint checkpoint;
    checkpoint.model_config = read_model_config(in);
    checkpoint.train_config = read_train_config(in);
    checkpoint.epochs_done = read_pod<int32_t>(in);
    checkpoint.next_epoch_seed = read_pod<uint64_t>(in);
    checkpoint.adam.beta1 = read_pod<double>(in);
    checkpoint.adam.beta2 = read_pod<double>(in);
    checkpoint.adam.epsilon = read_pod<double>(in);
    checkpoint.adam.t = read_pod<int64_t>(in);
    checkpoint.parameters = read_floats(in);
    checkpoint.adam.m = read_floats(in);
    checkpoint.adam.v = read_floats(in);
    if (checkpoint.adam.m.size() != checkpoint.parameters.size() ||
        checkpoint.adam.v.size() != checkpoint.parameters.size())
        throw IoError("checkpoint tensors disagree in size: " + path);
    return checkpoint;
}

Transformer<float> restore_model(const Checkpoint& checkpoint) {
    Transformer<float> model(checkpoint.model_config);
    if (model.parameter_count() != checkpoint.parameters.size())
        throw IoError("checkpoint parameters do not fit the stored configuration");
    model.parameters() = checkpoint.parameters;
    return model;
}

double grad_check(const ModelConfig& config, const std::vector<TokenSeq>& items,
                  int probes_per_tensor, uint64_t seed) {
    if (items.empty() || probes_per_tensor <= 0)
        throw UsageError("gradient check needs items and probes");
    const double background = 0.2;
    Transformer<double> model(config);
    Rng rng(seed);
    model.init_weights(rng);
    model.zero_gradients();
    for (const TokenSeq& item : items) model.accumulate(item, background);
    const Eigen::VectorXd analytic = model.gradients();

    auto summed_loss = [&]() {
        double total = 0;
        for (const TokenSeq& item : items) total += model.evaluate(item, background).weighted;
        return total;
    };
    Eigen::VectorXd& params = model.parameters();
    double worst = 0;
    for (const auto& info : model.tensors()) {
        const int64_t count = int64_t(info.rows) * info.cols;
        for (int probe = 0; probe < probes_per_tensor; ++probe) {
            const int64_t at = info.offset + rng.uniform_int(0, count - 1);
            const double original = params[at];
            const double h = 1e-5 * std::max(1.0, std::abs(original));
            params[at] = original + h;
            const double up = summed_loss();
            params[at] = original - h;
            const double down = summed_loss();
            params[at] = original;
            const double numeric = (up - down) / (2 * h);
            // The 1e-3 denominator floor keeps finite-difference roundoff on
            // near-zero coordinates from masquerading as gradient error;
            // typical gradient magnitudes here are O(1).
            const double rel = std::abs(analytic[at] - numeric) /
                               std::max(std::abs(analytic[at]) + std::abs(numeric), 1e-3);
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

}  // namespace carc
