#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <carc/episode.hpp>
#include <carc/metrics.hpp>

namespace carc {

// What went wrong with one query answer, most informative match first:
// unparseable output; input echoed back; exactly one cue applied; exactly
// two cues applied; right shapes and colors in the wrong place; right
// colors in the wrong shapes; anything else.
enum class ErrorCategory {
    format,
    no_transformation,
    primitive_shape,
    primitive_color,
    primitive_neighbor,
    level1_shape_color,
    level1_shape_neighbor,
    level1_color_neighbor,
    invalid_position,
    invalid_shape,
    other,
};
inline constexpr int kErrorCategories = 11;

std::string error_category_name(ErrorCategory category);
ErrorCategory error_category_from_name(const std::string& name);

// Classifies one wrong answer. Throws NotAnError when the prediction
// equals the query target (callers filter correct answers first).
// Partial-application categories compare the prediction against each
// sub-composite of the episode grammar applied to the query target; within
// a priority level the first match in shape, color, neighbor order wins,
// and `matches` (when given) receives every match at that level.
ErrorCategory classify_error(const Episode& episode, int query_index,
                             const std::optional<Grid>& prediction,
                             std::vector<ErrorCategory>* matches = nullptr);

struct ErrorTable {
    int total = 0;
    std::array<int, kErrorCategories> counts{};

    double fraction(ErrorCategory category) const {
        return total == 0 ? 0.0
                          : static_cast<double>(counts[static_cast<size_t>(category)]) / total;
    }
};

// Classifies every wrong or unparseable answer in a prediction run;
// correct answers are skipped, never counted.
ErrorTable classify_errors(const std::vector<Episode>& episodes,
                           const std::vector<PredictionRecord>& predictions);

std::string error_table_text(const ErrorTable& table);

}  // namespace carc
