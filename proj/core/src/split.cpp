#include <carc/split.hpp>

#include <algorithm>

#include <carc/rng.hpp>

namespace carc {

SplitSpec make_split(uint64_t seed) {
    SplitSpec spec;
    spec.seed = seed;
    std::vector<int> indices(family_triplets().size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(indices);
    spec.eval_triplets = {indices[0], indices[1]};
    spec.train_triplets.assign(indices.begin() + 2, indices.end());
    std::sort(spec.eval_triplets.begin(), spec.eval_triplets.end());
    std::sort(spec.train_triplets.begin(), spec.train_triplets.end());
    return spec;
}

SplitSpec split_dataset(const std::vector<Episode>& episodes, uint64_t seed) {
    SplitSpec spec = make_split(seed);
    size_t held_out = 0;
    for (const Episode& episode : episodes) {
        int triplet = triplet_index(episode.grammar.triplet());
        bool eval = std::binary_search(spec.eval_triplets.begin(), spec.eval_triplets.end(),
                                       triplet);
        if (!eval) {
            spec.train_ids.push_back(episode.id);
        } else {
            (held_out % 2 == 0 ? spec.val_ids : spec.test_ids).push_back(episode.id);
            ++held_out;
        }
    }
    return spec;
}

}  // namespace carc
