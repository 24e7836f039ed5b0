#pragma once

#include <cstdint>
#include <vector>

#include <carc/episode.hpp>

namespace carc {

// Systematicity split over grammars: two of the ten family triplets are
// held out, and episodes built on them are divided evenly between
// validation and test; every other episode trains. Triplets are stored as
// indices into family_triplets().
struct SplitSpec {
    uint64_t seed = 0;
    std::vector<int> train_triplets;  // 8, ascending
    std::vector<int> eval_triplets;   // 2, ascending; shared by val and test
    std::vector<uint64_t> train_ids;
    std::vector<uint64_t> val_ids;
    std::vector<uint64_t> test_ids;

    bool operator==(const SplitSpec&) const = default;
};

// Triplet partition only; episode id lists stay empty.
SplitSpec make_split(uint64_t seed);

// Routes each episode by its grammar's triplet: train triplets go to train,
// held-out triplets alternate val, test, val, ... in episode order.
SplitSpec split_dataset(const std::vector<Episode>& episodes, uint64_t seed);

}  // namespace carc
