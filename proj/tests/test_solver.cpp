#include <doctest.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <carc/errors.hpp>
#include <carc/generator.hpp>
#include <carc/grid.hpp>
#include <carc/metrics.hpp>
#include <carc/rng.hpp>
#include <carc/shapes.hpp>
#include <carc/solver.hpp>

using namespace carc;

namespace {

bool has_composite(const std::vector<TransformCandidate>& candidates, const Composite& composite) {
    return std::any_of(candidates.begin(), candidates.end(),
                       [&](const TransformCandidate& c) { return c.composite == composite; });
}

Composite full_composite(const VisualGrammar& grammar) {
    return canonical_order(
        {grammar.assignment[0], grammar.assignment[1], grammar.assignment[2]});
}

}  // namespace

TEST_CASE("single translations are recovered from a pair") {
    Grid input = paint(Grid{}, make_object(shape_library()[6], {2, 2}, Color::blue));
    ObjectRef object = extract_objects(input).front();
    Grid output = apply_spec(input, object, Translate{Direction::down, 1});

    auto candidates = infer_transform(input, output, Mode::restricted);
    CHECK(has_composite(candidates, {Translate{Direction::down, 1}}));
    for (const TransformCandidate& c : candidates) CHECK(c.target == object);
}

TEST_CASE("two-part composites are recovered from a pair") {
    Grid input = paint(Grid{}, make_object(shape_library()[7], {2, 2}, Color::red));
    ObjectRef object = extract_objects(input).front();
    Composite truth = canonical_order({Translate{Direction::down, 1}, Reflect{Axis::horizontal}});
    Grid output = apply_composite(input, object, truth);

    auto candidates = infer_transform(input, output, Mode::restricted);
    CHECK(has_composite(candidates, truth));
}

TEST_CASE("identity and garbage pairs have no explanation") {
    Grid input = paint(Grid{}, make_object(shape_library()[6], {2, 2}, Color::blue));
    CHECK_THROWS_AS(infer_transform(input, input, Mode::restricted), NoExplanation);

    Grid garbage = input;
    garbage.set(9, 9, 4);
    CHECK_THROWS_AS(infer_transform(input, garbage, Mode::extended), NoExplanation);
}

TEST_CASE("stored pairs always contain the generating composite") {
    DatasetConfig config;
    config.master_seed = 9100;
    config.n_episodes = 6;
    config.mode = Mode::extended;
    for (const Episode& episode : generate_dataset(config)) {
        for (const Sample& sample : episode.study) {
            auto candidates = infer_transform(sample.input, sample.output, Mode::extended);
            CHECK(has_composite(candidates, tier_composite(episode.grammar, sample.tier)));
        }
    }
}

TEST_CASE("grammar induction round trips every setup and ablation") {
    struct Variant {
        Mode mode;
        Setup setup;
        Ablation ablation;
        uint64_t seed;
    };
    const std::vector<Variant> variants = {
        {Mode::restricted, Setup::systematicity, Ablation::none, 4001},
        {Mode::extended, Setup::systematicity, Ablation::none, 4002},
        {Mode::restricted, Setup::systematicity, Ablation::no_primitives, 4003},
        {Mode::extended, Setup::systematicity, Ablation::no_primitives, 4004},
        {Mode::restricted, Setup::systematicity, Ablation::no_level1, 4005},
        {Mode::extended, Setup::systematicity, Ablation::no_level1, 4006},
        {Mode::restricted, Setup::three_shot, Ablation::none, 4007},
        {Mode::extended, Setup::three_shot, Ablation::none, 4008},
    };
    for (const Variant& variant : variants) {
        // INFO stringifies its operands lazily, so they must outlive the body.
        std::string label = (variant.mode == Mode::restricted ? "mode restricted" : "mode extended");
        label += " setup " + setup_name(variant.setup);
        label += " ablation " + ablation_name(variant.ablation);
        INFO(label);
        DatasetConfig config;
        config.master_seed = variant.seed;
        config.n_episodes = 25;
        config.mode = variant.mode;
        config.setup = variant.setup;
        config.ablation = variant.ablation;
        for (const Episode& episode : generate_dataset(config)) {
            VisualGrammar induced = induce_grammar(episode, variant.mode);
            if (variant.setup == Setup::systematicity) {
                CHECK(induced == episode.grammar);
            } else {
                CHECK(full_composite(induced) == full_composite(episode.grammar));
                CHECK(induced.shape_key == episode.grammar.shape_key);
                CHECK(induced.color_key == episode.grammar.color_key);
                CHECK(induced.neighbor_shape == episode.grammar.neighbor_shape);
                CHECK(induced.neighbor_color == episode.grammar.neighbor_color);
            }
            for (const Sample& query : episode.queries)
                CHECK(solve_query(induced, query.input) == query.output);
        }
    }
}

TEST_CASE("solving a full run scores perfectly") {
    DatasetConfig config;
    config.master_seed = 8600;
    config.n_episodes = 20;
    config.mode = Mode::restricted;
    config.setup = Setup::systematicity;
    auto episodes = generate_dataset(config);
    config.master_seed = 8601;
    config.mode = Mode::extended;
    config.setup = Setup::three_shot;
    for (Episode& episode : generate_dataset(config)) {
        episode.id += 1000;
        episodes.push_back(episode);
    }

    std::vector<PredictionRecord> predictions;
    for (const Episode& episode : episodes) {
        Mode mode = episode.id < 1000 ? Mode::restricted : Mode::extended;
        auto part = solve_episodes({episode}, mode);
        predictions.insert(predictions.end(), part.begin(), part.end());
    }
    EvalReport report = score_predictions(episodes, predictions);
    CHECK(report.n == static_cast<int>(episodes.size()) * kQueriesPerEpisode);
    CHECK(report.exact_match == 1.0);
    CHECK(report.color_acc == 1.0);
    CHECK(report.shape_acc == 1.0);
}

TEST_CASE("corrupted study samples are rejected as inconsistent") {
    DatasetConfig config;
    config.master_seed = 5150;
    config.n_episodes = 4;
    auto episodes = generate_dataset(config);

    Episode extra_cell = episodes[0];
    Grid& tampered = extra_cell.study[0].output;
    bool placed = false;
    for (int r = 0; r < Grid::kSide && !placed; ++r)
        for (int c = 0; c < Grid::kSide && !placed; ++c)
            if (tampered.at(r, c) == 0) {
                bool isolated = true;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc)
                        if (Grid::in_bounds(r + dr, c + dc) && tampered.at(r + dr, c + dc) != 0)
                            isolated = false;
                if (!isolated) continue;
                tampered.set(r, c, 9);
                placed = true;
            }
    REQUIRE(placed);
    CHECK_THROWS_AS(induce_grammar(extra_cell, Mode::restricted), InconsistentGrammar);

    Episode echoed = episodes[1];
    echoed.study[2].output = echoed.study[2].input;
    CHECK_THROWS_AS(induce_grammar(echoed, Mode::restricted), InconsistentGrammar);

    Episode empty = episodes[2];
    empty.study.clear();
    CHECK_THROWS_AS(induce_grammar(empty, Mode::restricted), InconsistentGrammar);
}

TEST_CASE("a swapped study output contradicts its sibling sample") {
    DatasetConfig config;
    config.master_seed = 6200;
    config.n_episodes = 12;
    auto episodes = generate_dataset(config);

    bool exercised = false;
    for (Episode episode : episodes) {
        auto triplet = episode.grammar.triplet();
        if (std::find(triplet.begin(), triplet.end(), TransformFamily::translation) !=
            triplet.end())
            continue;
        Sample& sample = episode.study[0];
        auto in_objects = extract_objects(sample.input);
        auto out_objects = extract_objects(sample.output);
        for (const ObjectRef& object : in_objects) {
            if (std::find(out_objects.begin(), out_objects.end(), object) != out_objects.end())
                continue;
            if (!check_valid(sample.input, object, Translate{Direction::down, 1})) break;
            sample.output = apply_spec(sample.input, object, Translate{Direction::down, 1});
            CHECK_THROWS_AS(induce_grammar(episode, Mode::restricted), InconsistentGrammar);
            exercised = true;
            break;
        }
        if (exercised) break;
    }
    CHECK(exercised);
}

TEST_CASE("an extended-mode episode cannot be induced in restricted mode") {
    DatasetConfig config;
    config.master_seed = 7300;
    config.n_episodes = 40;
    config.mode = Mode::extended;
    bool exercised = false;
    for (const Episode& episode : generate_dataset(config)) {
        bool extended_recolor = false;
        for (const TransformSpec& spec : episode.grammar.assignment)
            if (const auto* recolor = std::get_if<Recolor>(&spec))
                extended_recolor |= recolor->target == Color::yellow ||
                                    recolor->target == Color::green;
        if (!extended_recolor) continue;
        CHECK_THROWS_AS(induce_grammar(episode, Mode::restricted), InconsistentGrammar);
        exercised = true;
        break;
    }
    CHECK(exercised);
}

TEST_CASE("an axis-anonymous shape key defeats induction by design") {
    VisualGrammar grammar;
    grammar.assignment = {make_spec("reflection", "horizontal"), make_spec("translation", "down"),
                          make_spec("extension", "up")};
    grammar.shape_key = 3;  // the 3-cell diagonal: both mirror images coincide
    grammar.color_key = Color::blue;
    grammar.neighbor_shape = 0;
    grammar.neighbor_color = Color::orange;
    grammar.mode = Mode::restricted;
    REQUIRE_FALSE(keys_feasible(grammar));

    Episode episode;
    episode.id = 0;
    episode.grammar = grammar;
    episode.setup = Setup::systematicity;
    Rng rng(13579);
    for (Tier tier : study_schedule(Setup::systematicity, Ablation::none))
        episode.study.push_back(synthesize_sample(rng, grammar, tier));
    CHECK_THROWS_AS(induce_grammar(episode, Mode::restricted), AmbiguousGrammar);
}

TEST_CASE("solve_query demands the keyed target and the indicator") {
    DatasetConfig config;
    config.master_seed = 2718;
    config.n_episodes = 3;
    auto episodes = generate_dataset(config);
    const Episode& episode = episodes[0];
    const VisualGrammar& grammar = episode.grammar;
    const Grid& input = episode.queries[0].input;

    std::optional<ObjectRef> target, indicator;
    for (const ObjectRef& object : extract_objects(input)) {
        if (object.color == grammar.color_key &&
            object.shape() == shape_library()[static_cast<size_t>(grammar.shape_key)])
            target = object;
        else
            indicator = object;
    }
    REQUIRE(target);
    REQUIRE(indicator);

    CHECK_THROWS_AS(solve_query(grammar, erase(input, *indicator)), NoTargetError);
    CHECK_THROWS_AS(solve_query(grammar, erase(input, *target)), NoTargetError);

    ObjectRef recolored = *target;
    recolored.color = free_color_pool(grammar).front();
    CHECK_THROWS_AS(solve_query(grammar, paint(erase(input, *target), recolored)), NoTargetError);

    Grid doubled;
    const Shape& key_shape = shape_library()[static_cast<size_t>(grammar.shape_key)];
    const Shape& ind_shape = shape_library()[static_cast<size_t>(grammar.neighbor_shape)];
    doubled = paint(doubled, make_object(key_shape, {0, 0}, grammar.color_key));
    doubled = paint(doubled, make_object(key_shape, {6, 6}, grammar.color_key));
    doubled = paint(doubled, make_object(ind_shape, {0, 6}, grammar.neighbor_color));
    CHECK_THROWS_AS(solve_query(grammar, doubled), NoTargetError);
}
