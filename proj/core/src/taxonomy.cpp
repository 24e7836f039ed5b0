#include <carc/taxonomy.hpp>

#include <iomanip>
#include <map>
#include <sstream>

#include <carc/errors.hpp>
#include <carc/shapes.hpp>
#include <carc/transform.hpp>

namespace carc {

namespace {

const char* kCategoryNames[kErrorCategories] = {
    "format",          "no_transformation",    "primitive_shape",
    "primitive_color", "primitive_neighbor",   "level1_shape_color",
    "level1_shape_neighbor", "level1_color_neighbor", "invalid_position",
    "invalid_shape",   "other"};

constexpr std::array<std::pair<Tier, ErrorCategory>, 3> kPrimitiveLevels = {{
    {Tier::primitive_shape, ErrorCategory::primitive_shape},
    {Tier::primitive_color, ErrorCategory::primitive_color},
    {Tier::primitive_neighbor, ErrorCategory::primitive_neighbor},
}};

constexpr std::array<std::pair<Tier, ErrorCategory>, 3> kLevel1Levels = {{
    {Tier::level1_shape_color, ErrorCategory::level1_shape_color},
    {Tier::level1_shape_neighbor, ErrorCategory::level1_shape_neighbor},
    {Tier::level1_color_neighbor, ErrorCategory::level1_color_neighbor},
}};

// The query target is the object carrying both the shape and the color key;
// generated queries have exactly one.
std::optional<ObjectRef> locate_target(const Grid& input, const VisualGrammar& grammar) {
    const Shape& key = shape_library()[static_cast<size_t>(grammar.shape_key)];
    std::optional<ObjectRef> target;
    for (const ObjectRef& obj : extract_objects(input)) {
        if (obj.color != grammar.color_key || obj.shape() != key) continue;
        if (target) return std::nullopt;
        target = obj;
    }
    return target;
}

bool simulates_to(const Grid& input, const ObjectRef& target, const Composite& specs,
                  const Grid& pred) {
    try {
        return apply_composite(input, target, specs) == pred;
    } catch (const InvalidTransform&) {
        return false;
    }
}

template <size_t N>
std::optional<ErrorCategory> match_level(const std::array<std::pair<Tier, ErrorCategory>, N>& level,
                                         const Episode& episode, const Grid& input,
                                         const ObjectRef& target, const Grid& pred,
                                         std::vector<ErrorCategory>* matches) {
    std::optional<ErrorCategory> first;
    for (const auto& [tier, category] : level) {
        if (!simulates_to(input, target, tier_composite(episode.grammar, tier), pred)) continue;
        if (!first) first = category;
        if (matches) matches->push_back(category);
    }
    return first;
}

}  // namespace

std::string error_category_name(ErrorCategory category) {
    return kCategoryNames[static_cast<size_t>(category)];
}

ErrorCategory error_category_from_name(const std::string& name) {
    for (int i = 0; i < kErrorCategories; ++i)
        if (name == kCategoryNames[i]) return static_cast<ErrorCategory>(i);
    throw MismatchError("unknown error category: " + name);
}

ErrorCategory classify_error(const Episode& episode, int query_index,
                             const std::optional<Grid>& prediction,
                             std::vector<ErrorCategory>* matches) {
    if (matches) matches->clear();
    if (query_index < 0 || query_index >= static_cast<int>(episode.queries.size()))
        throw MismatchError("query index out of range");
    const Sample& query = episode.queries[static_cast<size_t>(query_index)];

    auto single = [&](ErrorCategory category) {
        if (matches) matches->push_back(category);
        return category;
    };

    if (!prediction) return single(ErrorCategory::format);
    const Grid& pred = *prediction;
    if (pred == query.output) throw NotAnError("prediction matches the target");
    if (pred == query.input) return single(ErrorCategory::no_transformation);

    if (auto target = locate_target(query.input, episode.grammar)) {
        if (auto hit = match_level(kPrimitiveLevels, episode, query.input, *target, pred, matches))
            return *hit;
        if (auto hit = match_level(kLevel1Levels, episode, query.input, *target, pred, matches))
            return *hit;
    }

    int color = color_accuracy(pred, query.output);
    int shape = shape_accuracy(pred, query.output);
    if (color == 1 && shape == 1) return single(ErrorCategory::invalid_position);
    if (color == 1 && shape == 0) return single(ErrorCategory::invalid_shape);
    return single(ErrorCategory::other);
}

ErrorTable classify_errors(const std::vector<Episode>& episodes,
                           const std::vector<PredictionRecord>& predictions) {
    std::map<uint64_t, const Episode*> by_id;
    for (const Episode& episode : episodes) by_id[episode.id] = &episode;

    ErrorTable table;
    for (const PredictionRecord& record : predictions) {
        auto found = by_id.find(record.episode_id);
        if (found == by_id.end())
            throw MismatchError("prediction for unknown episode " +
                                std::to_string(record.episode_id));
        try {
            ErrorCategory category =
                classify_error(*found->second, record.query_index, record.prediction);
            table.counts[static_cast<size_t>(category)] += 1;
            table.total += 1;
        } catch (const NotAnError&) {
        }
    }
    return table;
}

std::string error_table_text(const ErrorTable& table) {
    std::ostringstream out;
    out << "errors: " << table.total << "\n";
    if (table.total == 0) return out.str();
    for (int i = 0; i < kErrorCategories; ++i) {
        ErrorCategory category = static_cast<ErrorCategory>(i);
        out << std::left << std::setw(24) << error_category_name(category) << std::right
            << std::setw(8) << table.counts[static_cast<size_t>(i)] << "  " << std::fixed
            << std::setprecision(4) << table.fraction(category) << "\n";
    }
    return out.str();
}

}  // namespace carc
