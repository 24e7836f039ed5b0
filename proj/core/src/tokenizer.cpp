#include <carc/tokenizer.hpp>

#include <string>

#include <carc/errors.hpp>

namespace carc {

namespace {

void append_grid(std::vector<SourceToken>& out, const Grid& grid, int pair, TokenRole role) {
    for (int r = 0; r < kPatchSide; ++r)
        for (int c = 0; c < kPatchSide; ++c) out.push_back({patch_token(grid, r, c), pair, r, c, role});
}

}  // namespace

int patch_token(const Grid& grid, int patch_row, int patch_col) {
    int id = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) id = id * 10 + grid.at(2 * patch_row + i, 2 * patch_col + j);
    return id;
}

void place_patch(Grid& grid, int patch_row, int patch_col, int id) {
    if (id < 0 || id >= kPatchTokens)
        throw MismatchError("token " + std::to_string(id) + " is not a patch token");
    for (int i = 1; i >= 0; --i)
        for (int j = 1; j >= 0; --j) {
            grid.set(2 * patch_row + i, 2 * patch_col + j, static_cast<uint8_t>(id % 10));
            id /= 10;
        }
}

std::vector<int> grid_tokens(const Grid& grid) {
    std::vector<int> tokens;
    tokens.reserve(kPatchesPerGrid);
    for (int r = 0; r < kPatchSide; ++r)
        for (int c = 0; c < kPatchSide; ++c) tokens.push_back(patch_token(grid, r, c));
    return tokens;
}

Grid grid_from_tokens(const std::vector<int>& tokens) {
    if (tokens.size() != kPatchesPerGrid)
        throw MismatchError("expected " + std::to_string(kPatchesPerGrid) + " patch tokens, got " +
                            std::to_string(tokens.size()));
    Grid grid;
    for (int r = 0; r < kPatchSide; ++r)
        for (int c = 0; c < kPatchSide; ++c)
            place_patch(grid, r, c, tokens[static_cast<size_t>(r * kPatchSide + c)]);
    return grid;
}

TokenSeq tokenize_pairs(const std::vector<Sample>& study, const Grid& query_input,
                        const Grid& query_output) {
    TokenSeq seq;
    const int pairs = static_cast<int>(study.size());
    seq.source.reserve(static_cast<size_t>(pairs) * (2 * kPatchesPerGrid + 2) + kPatchesPerGrid);
    for (int p = 0; p < pairs; ++p) {
        if (p > 0) seq.source.push_back({kPairSeparator, p, -1, -1, TokenRole::separator});
        append_grid(seq.source, study[static_cast<size_t>(p)].input, p, TokenRole::study_in);
        seq.source.push_back({kIoSeparator, p, -1, -1, TokenRole::separator});
        append_grid(seq.source, study[static_cast<size_t>(p)].output, p, TokenRole::study_out);
    }
    append_grid(seq.source, query_input, pairs, TokenRole::query_in);
    seq.source.push_back({kIoSeparator, pairs, -1, -1, TokenRole::separator});
    seq.target.reserve(kTargetLength);
    seq.target.push_back(kSos);
    for (int token : grid_tokens(query_output)) seq.target.push_back(token);
    seq.target.push_back(kEos);
    return seq;
}

std::vector<TokenSeq> tokenize_episode(const Episode& episode, int query_index, bool copy_task) {
    const Sample& query = episode.queries.at(static_cast<size_t>(query_index));
    std::vector<TokenSeq> items;
    items.reserve(1 + (copy_task ? episode.study.size() : 0));
    items.push_back(tokenize_pairs(episode.study, query.input, query.output));
    if (copy_task)
        for (const Sample& sample : episode.study)
            items.push_back(tokenize_pairs(episode.study, sample.input, sample.output));
    return items;
}

Grid apply_noise(const Grid& grid, Rng& rng, double p) {
    Grid out = grid;
    for (int r = 0; r < Grid::kSide; ++r)
        for (int c = 0; c < Grid::kSide; ++c) {
            if (!rng.bernoulli(p)) continue;
            int draw = rng.uniform_int(0, 8);
            if (draw >= out.at(r, c)) ++draw;
            out.set(r, c, static_cast<uint8_t>(draw));
        }
    return out;
}

}  // namespace carc
