#include <carc/metrics.hpp>

#include <algorithm>
#include <array>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <carc/errors.hpp>

namespace carc {

int exact_match(const Grid& pred, const Grid& target) { return pred == target ? 1 : 0; }

int color_accuracy(const Grid& pred, const Grid& target) {
    std::array<int, 10> pred_counts{}, target_counts{};
    for (const ObjectRef& obj : extract_objects(pred))
        pred_counts[static_cast<size_t>(obj.color)]++;
    for (const ObjectRef& obj : extract_objects(target))
        target_counts[static_cast<size_t>(obj.color)]++;
    return pred_counts == target_counts ? 1 : 0;
}

int shape_accuracy(const Grid& pred, const Grid& target) {
    auto shapes_of = [](const Grid& grid) {
        std::vector<Shape> shapes;
        for (const ObjectRef& obj : extract_objects(grid)) shapes.push_back(obj.shape());
        std::sort(shapes.begin(), shapes.end());
        return shapes;
    };
    return shapes_of(pred) == shapes_of(target) ? 1 : 0;
}

EvalReport score_predictions(const std::vector<Episode>& episodes,
                             const std::vector<PredictionRecord>& predictions,
                             FormatPolicy policy) {
    std::map<uint64_t, const Episode*> by_id;
    for (const Episode& episode : episodes) by_id[episode.id] = &episode;

    std::map<uint64_t, EpisodeScore> scores;
    std::set<std::pair<uint64_t, int>> seen;
    for (const PredictionRecord& record : predictions) {
        auto found = by_id.find(record.episode_id);
        if (found == by_id.end())
            throw MismatchError("prediction for unknown episode " +
                                std::to_string(record.episode_id));
        const Episode& episode = *found->second;
        if (record.query_index < 0 ||
            record.query_index >= static_cast<int>(episode.queries.size()))
            throw MismatchError("prediction query index out of range");
        if (!seen.insert({record.episode_id, record.query_index}).second)
            throw MismatchError("duplicate prediction for episode " +
                                std::to_string(record.episode_id) + " query " +
                                std::to_string(record.query_index));

        EpisodeScore& score = scores[record.episode_id];
        score.episode_id = record.episode_id;
        if (!record.prediction) {
            if (policy == FormatPolicy::count_as_zero) score.n += 1;
            continue;
        }
        const Grid& target = episode.queries[static_cast<size_t>(record.query_index)].output;
        score.n += 1;
        score.exact += exact_match(*record.prediction, target);
        score.color += color_accuracy(*record.prediction, target);
        score.shape += shape_accuracy(*record.prediction, target);
    }

    EvalReport report;
    int exact = 0, color = 0, shape = 0;
    for (auto& [id, score] : scores) {
        report.n += score.n;
        exact += score.exact;
        color += score.color;
        shape += score.shape;
        report.episodes.push_back(score);
    }
    if (report.n > 0) {
        report.exact_match = static_cast<double>(exact) / report.n;
        report.color_acc = static_cast<double>(color) / report.n;
        report.shape_acc = static_cast<double>(shape) / report.n;
    }
    return report;
}

std::string report_text(const EvalReport& report) {
    std::ostringstream out;
    out << "pairs scored: " << report.n << "\n";
    auto line = [&](const char* name, double value) {
        out << std::left << std::setw(13) << name;
        if (report.n == 0)
            out << "-";
        else
            out << std::fixed << std::setprecision(4) << value;
        out << "\n";
    };
    line("exact_match", report.exact_match);
    line("color_acc", report.color_acc);
    line("shape_acc", report.shape_acc);
    return out.str();
}

}  // namespace carc
