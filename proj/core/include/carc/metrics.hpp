#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <carc/episode.hpp>
#include <carc/grid.hpp>

namespace carc {

// One model or solver answer to one query. A missing grid records a
// response that could not be parsed into a 10x10 grid at all.
struct PredictionRecord {
    uint64_t episode_id = 0;
    int query_index = 0;
    std::optional<Grid> prediction;

    bool operator==(const PredictionRecord&) const = default;
};

// Cell-wise equality.
int exact_match(const Grid& pred, const Grid& target);

// Same number of objects of every color, locations ignored.
int color_accuracy(const Grid& pred, const Grid& target);

// Same multiset of normalized object shapes, colors and locations ignored.
int shape_accuracy(const Grid& pred, const Grid& target);

// How unparseable predictions enter the averages: scored as zero on all
// three metrics, or removed from the denominator.
enum class FormatPolicy { count_as_zero, drop };

struct EpisodeScore {
    uint64_t episode_id = 0;
    int n = 0;
    int exact = 0;
    int color = 0;
    int shape = 0;
};

struct EvalReport {
    int n = 0;
    double exact_match = 0.0;
    double color_acc = 0.0;
    double shape_acc = 0.0;
    std::vector<EpisodeScore> episodes;
};

// Scores prediction records against the queries they answer. Records must
// reference a known episode and query index, each at most once; violations
// throw MismatchError. Fractions are 0 when nothing was scored.
EvalReport score_predictions(const std::vector<Episode>& episodes,
                             const std::vector<PredictionRecord>& predictions,
                             FormatPolicy policy = FormatPolicy::count_as_zero);

// Fixed-width table; fractions print as absent when n is 0.
std::string report_text(const EvalReport& report);

}  // namespace carc
