#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <carc/episode.hpp>
#include <carc/rng.hpp>

namespace carc {

inline constexpr int kPlacementBudget = 10000;
inline constexpr int kQueriesPerEpisode = 10;

// Study tiers for a setup, in presentation order.
std::vector<Tier> study_schedule(Setup setup, Ablation ablation);

// Attributes the second sample of a systematicity tier slot must not reuse.
struct SlotAvoid {
    std::optional<Coord> anchor;
    std::optional<int> shape;  // library index; only honored when the tier leaves the shape free
};

// One input-output pair for a tier. The target is drawn uniformly over
// in-bounds anchors (and over the legal shape/color pools where the tier
// leaves them free) and redrawn until the tier composite is valid, every
// part changes the grid, the output differs from the input, and both grids
// extract to exactly the intended objects. Level-2 samples additionally
// admit every sub-composite of the grammar on their input, so partial
// explanations of a prediction are always well defined.
// Throws GenerationExhausted when kPlacementBudget draws all fail.
Sample synthesize_sample(Rng& rng, const VisualGrammar& grammar, Tier tier,
                         const SlotAvoid& avoid = {});

// Study samples per the setup schedule plus 10 level-2 queries with
// pairwise distinct inputs. Propagates GenerationExhausted.
Episode build_episode(Rng& rng, const VisualGrammar& grammar, Setup setup,
                      Ablation ablation = Ablation::none);

struct DatasetConfig {
    uint64_t master_seed = 0;
    int n_episodes = 0;
    Mode mode = Mode::restricted;
    Setup setup = Setup::systematicity;
    Ablation ablation = Ablation::none;
};

// Streams episodes in index order. Episode i is generated from
// derive_seed(master_seed, i), so the output is a pure function of the
// config no matter how generation is scheduled; the grammar-signature dedup
// set admits episodes in index order. A grammar whose placement budget runs
// out is rekeyed rather than aborting the run.
// Throws DuplicateBudgetExceeded when a fresh grammar signature cannot be
// found, GenerationExhausted when an episode cannot be assembled.
void generate_dataset(const DatasetConfig& config, const std::function<void(Episode&&)>& sink);

std::vector<Episode> generate_dataset(const DatasetConfig& config);

// Fixed-grammar corpus of individual pairs: all but the last 40 cycle the
// six component tiers and form the training split, the next 20 continue the
// cycle as validation, and the last 20 are level-2 compositions, which
// therefore never appear in training.
struct StaticPair {
    Sample sample;
    std::string split;  // "train", "val" or "test"
};

struct StaticCorpus {
    VisualGrammar grammar;
    std::vector<StaticPair> pairs;
};

StaticCorpus generate_static_corpus(uint64_t master_seed, int n, Mode mode);

}  // namespace carc
