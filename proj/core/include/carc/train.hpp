#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <carc/episode.hpp>
#include <carc/metrics.hpp>
#include <carc/model.hpp>
#include <carc/tokenizer.hpp>

namespace carc {

// Optimization schedule and data handling for one training run. The defaults
// are the three-shot recipe; systematicity runs raise epochs to 300.
struct TrainConfig {
    int epochs = 200;
    int batch_episodes = 200;  // one optimizer step consumes this many episodes
    int grad_accumulation = 2; // micro-batches per step; the engine accumulates
                               // per item, so any split yields the same update
    double peak_lr = 0.01;
    double warmup_start_lr = 1e-4;  // warmup spans the first epoch
    double final_lr = 5e-4;         // linear decay lands here at the last step
    double weight_decay = 0.01;
    double noise_prob = 0.001;  // per-cell recolor rate on training targets
    double background_weight = 0.2;
    bool copy_task = true;
    uint64_t seed = 0;
    int eval_every = 1;  // epochs between validation decodes; 0 disables

    bool operator==(const TrainConfig&) const = default;
};

// Learning rate at a 0-based global step: linear warmup from warmup_start_lr
// to peak_lr across the first epoch's steps, then linear decay that reaches
// final_lr exactly at the last step.
double scheduled_lr(const TrainConfig& config, int64_t step, int64_t steps_per_epoch,
                    int64_t total_steps);

// Decoupled-weight-decay Adam moments over the flat parameter vector.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int64_t t = 0;
    Eigen::VectorXf m, v;

    explicit AdamState(Eigen::Index n = 0)
        : m(Eigen::VectorXf::Zero(n)), v(Eigen::VectorXf::Zero(n)) {}
};

// One optimizer update with the given mean gradient.
void adam_step(Transformer<float>& model, AdamState& state, const Eigen::VectorXf& gradient,
               double lr, double weight_decay);

// One metrics-log line. Validation columns hold -1 on epochs without a
// greedy-decode evaluation.
struct EpochRecord {
    int epoch = 0;          // 1-based, the epoch just finished
    double train_loss = 0;  // weighted cross-entropy mean over the epoch
    double val_exact = -1;
    double val_color = -1;
    double val_shape = -1;
};

// Greedy-decodes every query of every episode and scores the grids; episode
// ids must be distinct.
EvalReport evaluate_model(const Transformer<float>& model, const std::vector<Episode>& episodes);

// Meta-trains the model in place over epochs [start_epoch, stop_epoch) of
// the schedule that config.epochs defines (stop_epoch -1 means the end), one
// record per completed epoch. Epoch e draws all of its randomness from
// derive_seed(config.seed, e), so resuming from an epoch boundary
// (start_epoch = epochs already done) continues the exact run. Throws
// NonFiniteLoss when the loss leaves the reals and UsageError on an
// unusable configuration.
std::vector<EpochRecord> train_model(Transformer<float>& model, AdamState& adam,
                                     const TrainConfig& config,
                                     const std::vector<Episode>& train_episodes,
                                     const std::vector<Episode>& val_episodes,
                                     int start_epoch = 0, int stop_epoch = -1,
                                     std::ostream* log = nullptr);

// Everything needed to resume training at an epoch boundary.
struct Checkpoint {
    ModelConfig model_config;
    TrainConfig train_config;
    int epochs_done = 0;
    uint64_t next_epoch_seed = 0;  // derive_seed(seed, epochs_done), recorded
                                   // so the RNG stream is explicit in the file
    AdamState adam;
    Eigen::VectorXf parameters;
};

void save_checkpoint(const std::string& path, const Transformer<float>& model,
                     const AdamState& adam, const TrainConfig& config, int epochs_done);
Checkpoint load_checkpoint(const std::string& path);

// Model rebuilt from a checkpoint's config and parameters.
Transformer<float> restore_model(const Checkpoint& checkpoint);

// Worst relative error between analytic and central-difference gradients of
// the summed item losses, probing random coordinates of every tensor. Run at
// 64-bit precision on a miniature config.
double grad_check(const ModelConfig& config, const std::vector<TokenSeq>& items,
                  int probes_per_tensor, uint64_t seed);

}  // namespace carc
