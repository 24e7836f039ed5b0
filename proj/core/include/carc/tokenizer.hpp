#pragma once

#include <cstdint>
#include <vector>

#include <carc/episode.hpp>
#include <carc/grid.hpp>
#include <carc/rng.hpp>

namespace carc {

// Token ids. A 2x2 patch maps to [0, 10000) by reading its cells row-major as
// a base-10 number (top-left cell is the most significant digit); the four
// special tokens follow, for a vocabulary of 10,004.
constexpr int kPatchTokens = 10000;
constexpr int kPairSeparator = 10000;  // boundary between study pairs
constexpr int kIoSeparator = 10001;    // boundary between input and output grids
constexpr int kSos = 10002;
constexpr int kEos = 10003;
constexpr int kVocabSize = 10004;

constexpr int kPatchSide = Grid::kSide / 2;               // patches per grid row
constexpr int kPatchesPerGrid = kPatchSide * kPatchSide;  // 25
constexpr int kTargetLength = kPatchesPerGrid + 2;        // SOS + patches + EOS

// Source layout version. Layout (version 1): each study pair contributes its
// input patches, an io-separator, and its output patches; pairs are joined by
// pair separators; the query input patches and one final io-separator close
// the source. 12 study pairs hence yield 12*51 + 11 + 25 + 1 = 649 source
// tokens and 3 study pairs yield 181; targets are always SOS + 25 + EOS.
constexpr int kTokenLayoutVersion = 1;

// Patch id of the 2x2 block whose top-left cell is (2*patch_row, 2*patch_col).
int patch_token(const Grid& grid, int patch_row, int patch_col);

// Writes the block encoded by a patch token back into the grid.
// Throws MismatchError if id is not a patch token.
void place_patch(Grid& grid, int patch_row, int patch_col, int id);

// Row-major patch tokens of a full grid, kPatchesPerGrid of them.
std::vector<int> grid_tokens(const Grid& grid);

// Rebuilds a grid from row-major patch tokens. Throws MismatchError when the
// count is off or a token is not a patch token.
Grid grid_from_tokens(const std::vector<int>& tokens);

enum class TokenRole : uint8_t { study_in, study_out, query_in, separator };

struct SourceToken {
    int id = 0;
    int pair = 0;  // study-pair order; the query grid takes the next index
    int row = -1;  // patch coordinates; separators carry none
    int col = -1;
    TokenRole role = TokenRole::separator;

    bool operator==(const SourceToken&) const = default;
};

struct TokenSeq {
    std::vector<SourceToken> source;
    std::vector<int> target;  // SOS, patch tokens, EOS

    bool operator==(const TokenSeq&) const = default;
};

// One training/evaluation item: the study context with an answer to produce.
TokenSeq tokenize_pairs(const std::vector<Sample>& study, const Grid& query_input,
                        const Grid& query_output);

// Items for one query of an episode: the query item first and, with
// copy_task, one item per study sample whose "query" is that study input and
// whose target is the study output.
std::vector<TokenSeq> tokenize_episode(const Episode& episode, int query_index, bool copy_task);

// Independently recolors each cell with probability p, drawing uniformly
// from the nine values other than its current one. Applied to training
// targets before tokenization; evaluation targets are never noised.
Grid apply_noise(const Grid& grid, Rng& rng, double p);

}  // namespace carc
