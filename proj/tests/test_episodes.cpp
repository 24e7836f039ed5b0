#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <carc/dataset_io.hpp>
#include <carc/errors.hpp>
#include <carc/generator.hpp>
#include <carc/grammar.hpp>
#include <carc/shapes.hpp>
#include <carc/split.hpp>
#include <carc/transform.hpp>

using namespace carc;

namespace {

bool moore_connected(const Shape& shape) {
    if (shape.empty()) return false;
    std::vector<Coord> seen{shape.front()};
    std::vector<Coord> frontier{shape.front()};
    while (!frontier.empty()) {
        Coord cur = frontier.back();
        frontier.pop_back();
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                Coord next{cur.row + dr, cur.col + dc};
                if (std::find(shape.begin(), shape.end(), next) == shape.end()) continue;
                if (std::find(seen.begin(), seen.end(), next) != seen.end()) continue;
                seen.push_back(next);
                frontier.push_back(next);
            }
    }
    return seen.size() == shape.size();
}

// The one input object that does not reappear identically in the output.
ObjectRef find_target(const Sample& sample) {
    auto in_objs = extract_objects(sample.input);
    auto out_objs = extract_objects(sample.output);
    const ObjectRef* target = nullptr;
    for (const ObjectRef& obj : in_objs) {
        if (std::find(out_objs.begin(), out_objs.end(), obj) != out_objs.end()) continue;
        REQUIRE(target == nullptr);
        target = &obj;
    }
    REQUIRE(target != nullptr);
    return *target;
}

void check_sample(const Sample& sample, const VisualGrammar& grammar) {
    const auto& lib = shape_library();
    auto objects = extract_objects(sample.input);
    bool with_indicator = tier_has(sample.tier, IndicatorKind::neighbor);
    REQUIRE(objects.size() == (with_indicator ? 2u : 1u));

    ObjectRef target = find_target(sample);
    if (with_indicator) {
        const ObjectRef& indicator = objects[0] == target ? objects[1] : objects[0];
        CHECK(indicator.shape() == lib[static_cast<size_t>(grammar.neighbor_shape)]);
        CHECK(indicator.color == grammar.neighbor_color);
    }
    if (tier_has(sample.tier, IndicatorKind::shape)) {
        CHECK(target.shape() == lib[static_cast<size_t>(grammar.shape_key)]);
    } else {
        CHECK(target.shape() != lib[static_cast<size_t>(grammar.shape_key)]);
        CHECK(target.shape() != lib[static_cast<size_t>(grammar.neighbor_shape)]);
    }
    if (tier_has(sample.tier, IndicatorKind::color)) {
        CHECK(target.color == grammar.color_key);
    } else {
        CHECK(target.color != grammar.color_key);
        CHECK(target.color != grammar.neighbor_color);
    }

    Grid expected = apply_composite(sample.input, target, tier_composite(grammar, sample.tier));
    CHECK(expected == sample.output);
    CHECK_FALSE(sample.output == sample.input);
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("shape library holds 16 distinct connected normalized shapes of 3 to 6 cells") {
    const auto& lib = shape_library();
    REQUIRE(lib.size() == 16);
    for (const Shape& shape : lib) {
        CHECK(shape.size() >= 3);
        CHECK(shape.size() <= 6);
        CHECK(normalize(shape) == shape);
        CHECK(moore_connected(shape));
    }
    for (size_t i = 0; i < lib.size(); ++i)
        for (size_t j = i + 1; j < lib.size(); ++j) CHECK(lib[i] != lib[j]);
}

TEST_CASE("shape_library_index inverts the library") {
    const auto& lib = shape_library();
    for (size_t i = 0; i < lib.size(); ++i)
        CHECK(shape_library_index(lib[i]) == static_cast<int>(i));
    CHECK(shape_library_index({{0, 0}}) == -1);
}

TEST_CASE("quarter rotation fixes exactly the square and the plus") {
    const Shape square = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    const Shape plus = {{0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}};
    for (const Shape& shape : shape_library()) {
        bool fourfold = shape == square || shape == plus;
        CHECK(rotation_is_translation(shape) == fourfold);
    }
}

TEST_CASE("rotated_shape agrees with rotating a painted object") {
    for (const Shape& shape : shape_library()) {
        ObjectRef obj = make_object(shape, {3, 3}, Color::blue);
        Grid grid = paint(Grid{}, obj);
        for (bool clockwise : {true, false}) {
            Grid turned = apply_rotation(grid, obj,
                                         clockwise ? RotationSense::cw : RotationSense::ccw);
            auto objects = extract_objects(turned);
            REQUIRE(objects.size() == 1);
            CHECK(objects[0].shape() == rotated_shape(shape, clockwise));
        }
    }
}

TEST_CASE("symmetric_under agrees with reflection acting as identity") {
    for (const Shape& shape : shape_library()) {
        ObjectRef obj = make_object(shape, {3, 3}, Color::green);
        Grid grid = paint(Grid{}, obj);
        CHECK((apply_reflection(grid, obj, Axis::horizontal) == grid) ==
              symmetric_under(shape, true));
        CHECK((apply_reflection(grid, obj, Axis::vertical) == grid) ==
              symmetric_under(shape, false));
    }
}

TEST_CASE("the family triplets enumerate every three-subset exactly once") {
    const auto& triplets = family_triplets();
    REQUIRE(triplets.size() == 10);
    std::set<std::string> labels;
    for (size_t i = 0; i < triplets.size(); ++i) {
        const auto& t = triplets[i];
        CHECK(t[0] < t[1]);
        CHECK(t[1] < t[2]);
        CHECK(triplet_index(t) == static_cast<int>(i));
        labels.insert(triplet_label(t));
    }
    CHECK(labels.size() == 10);
    CHECK(triplet_label(triplets[0]) == "translation+rotation+reflection");
    CHECK(triplet_label(triplets[9]) == "reflection+extension+color_change");
    CHECK(triplet_index({TransformFamily::reflection, TransformFamily::translation,
                         TransformFamily::rotation}) == 0);
}

TEST_CASE("tier_kinds and tier_composite select the active cues in canonical order") {
    CHECK(tier_kinds(Tier::primitive_neighbor) ==
          std::vector<IndicatorKind>{IndicatorKind::neighbor});
    CHECK(tier_kinds(Tier::level1_shape_neighbor) ==
          std::vector<IndicatorKind>{IndicatorKind::shape, IndicatorKind::neighbor});
    CHECK(tier_kinds(Tier::level2).size() == 3);

    VisualGrammar grammar;
    grammar.assignment = {TransformSpec{Translate{Direction::down, 1}},
                          TransformSpec{Rotate{RotationSense::cw}},
                          TransformSpec{Reflect{Axis::vertical}}};
    Composite level2 = tier_composite(grammar, Tier::level2);
    REQUIRE(level2.size() == 3);
    CHECK(family_of(level2[0]) == TransformFamily::rotation);
    CHECK(family_of(level2[1]) == TransformFamily::reflection);
    CHECK(family_of(level2[2]) == TransformFamily::translation);
    Composite pair = tier_composite(grammar, Tier::level1_shape_color);
    REQUIRE(pair.size() == 2);
    CHECK(family_of(pair[0]) == TransformFamily::rotation);
    CHECK(family_of(pair[1]) == TransformFamily::translation);
    CHECK(tier_composite(grammar, Tier::primitive_color) ==
          Composite{TransformSpec{Rotate{RotationSense::cw}}});
}

TEST_CASE("grammar sampling is uniform over the ten triplets") {
    Rng rng(2024);
    std::array<int, 10> counts{};
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        VisualGrammar grammar = sample_grammar(rng, Mode::restricted);
        counts[static_cast<size_t>(triplet_index(grammar.triplet()))]++;
    }
    for (int count : counts) {
        CHECK(count >= 850);
        CHECK(count <= 1150);
    }
}

TEST_CASE("sampled grammars respect the mode parameter space and the key constraints") {
    Rng rng(7);
    bool saw_step2 = false, saw_left = false, saw_extended_recolor = false;
    for (int i = 0; i < 400; ++i) {
        Mode mode = i % 2 == 0 ? Mode::restricted : Mode::extended;
        VisualGrammar grammar = sample_grammar(rng, mode);
        CHECK(grammar.neighbor_shape != grammar.shape_key);
        CHECK(grammar.neighbor_color != grammar.color_key);
        auto triplet = grammar.triplet();
        CHECK(triplet[0] != triplet[1]);
        CHECK(triplet[1] != triplet[2]);
        CHECK(keys_feasible(grammar));
        for (const TransformSpec& spec : grammar.assignment) {
            if (const auto* t = std::get_if<Translate>(&spec)) {
                if (mode == Mode::restricted) {
                    CHECK(t->step == 1);
                    CHECK((t->dir == Direction::down || t->dir == Direction::right));
                } else {
                    saw_step2 |= t->step == 2;
                    saw_left |= t->dir == Direction::left;
                }
            }
            if (const auto* e = std::get_if<Extend>(&spec)) {
                if (mode == Mode::restricted)
                    CHECK((e->dir == Direction::up || e->dir == Direction::left));
            }
            if (const auto* r = std::get_if<Recolor>(&spec)) {
                if (mode == Mode::restricted) {
                    CHECK((r->target == Color::red || r->target == Color::orange));
                } else {
                    saw_extended_recolor |=
                        r->target == Color::yellow || r->target == Color::green;
                }
            }
        }
    }
    CHECK(saw_step2);
    CHECK(saw_left);
    CHECK(saw_extended_recolor);
}

TEST_CASE("free pools exclude keys, indicator attributes and recolor destinations") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        VisualGrammar grammar = sample_grammar(rng, Mode::extended);
        auto shapes = free_shape_pool(grammar);
        CHECK(std::find(shapes.begin(), shapes.end(), grammar.shape_key) == shapes.end());
        CHECK(std::find(shapes.begin(), shapes.end(), grammar.neighbor_shape) == shapes.end());
        auto triplet = grammar.triplet();
        if (std::find(triplet.begin(), triplet.end(), TransformFamily::rotation) !=
            triplet.end()) {
            CHECK_FALSE(rotation_is_translation(shape_library()[static_cast<size_t>(
                grammar.shape_key)]));
            for (int idx : shapes)
                CHECK_FALSE(rotation_is_translation(shape_library()[static_cast<size_t>(idx)]));
        }
        if (std::find(triplet.begin(), triplet.end(), TransformFamily::reflection) !=
            triplet.end()) {
            CHECK_FALSE(reflection_axes_coincide(shape_library()[static_cast<size_t>(
                grammar.shape_key)]));
            for (int idx : shapes)
                CHECK_FALSE(reflection_axes_coincide(shape_library()[static_cast<size_t>(idx)]));
        }
        for (Color c : free_color_pool(grammar)) {
            CHECK(c != grammar.color_key);
            CHECK(c != grammar.neighbor_color);
            for (const TransformSpec& spec : grammar.assignment)
                if (const auto* r = std::get_if<Recolor>(&spec)) CHECK(c != r->target);
        }
    }
}

TEST_CASE("keys become infeasible when a translation can mask the assignment") {
    auto build = [](Mode mode, TransformSpec a, TransformSpec b, TransformSpec c, int shape_key) {
        VisualGrammar g;
        g.mode = mode;
        g.assignment = {a, b, c};
        g.shape_key = shape_key;
        g.color_key = Color::blue;
        g.neighbor_shape = 0;
        g.neighbor_color = Color::gray;
        return g;
    };
    const int corner = 2, diagonal = 3;
    // With rotation and reflection both assigned, flipping sense and axis
    // together is an identity up to a shift, so on a 2x2 bounding box the
    // clockwise story moved right equals the counter-clockwise story moved
    // down. Only the matching sense/direction pairs are ambiguous.
    CHECK_FALSE(keys_feasible(build(Mode::restricted, Translate{Direction::right, 1},
                                    Rotate{RotationSense::cw}, Reflect{Axis::vertical}, corner)));
    CHECK_FALSE(keys_feasible(build(Mode::restricted, Translate{Direction::down, 1},
                                    Rotate{RotationSense::ccw}, Reflect{Axis::vertical}, corner)));
    CHECK(keys_feasible(build(Mode::restricted, Translate{Direction::down, 1},
                              Rotate{RotationSense::cw}, Reflect{Axis::vertical}, corner)));
    CHECK(keys_feasible(build(Mode::restricted, Translate{Direction::right, 1},
                              Rotate{RotationSense::ccw}, Reflect{Axis::vertical}, corner)));
    // On a diagonal the rotated and mirrored images coincide, and the
    // compensating move exists in the extended space but not the restricted
    // one.
    CHECK_FALSE(keys_feasible(build(Mode::extended, Translate{Direction::right, 1},
                                    Rotate{RotationSense::cw}, Extend{Direction::up}, diagonal)));
    CHECK(keys_feasible(build(Mode::restricted, Translate{Direction::right, 1},
                              Rotate{RotationSense::cw}, Extend{Direction::up}, diagonal)));
    // Reflection without rotation: two steps left of the corner shape can be
    // retold as a clockwise rotation moved one step left, while two steps
    // right runs out of compensating moves.
    CHECK_FALSE(keys_feasible(build(Mode::extended, Translate{Direction::left, 2},
                                    Reflect{Axis::horizontal}, Extend{Direction::up}, corner)));
    CHECK(keys_feasible(build(Mode::extended, Translate{Direction::right, 2},
                              Reflect{Axis::horizontal}, Extend{Direction::up}, corner)));
    // Extending up then stepping down equals extending down with one step
    // less, so within one mode the two stories differ only while the flipped
    // direction or the adjusted step is unavailable.
    const int ell = 7;
    CHECK_FALSE(keys_feasible(build(Mode::extended, Translate{Direction::down, 1},
                                    Extend{Direction::down}, Recolor{Color::red}, ell)));
    CHECK_FALSE(keys_feasible(build(Mode::extended, Translate{Direction::down, 2},
                                    Extend{Direction::up}, Recolor{Color::red}, ell)));
    CHECK(keys_feasible(build(Mode::extended, Translate{Direction::down, 2},
                              Extend{Direction::down}, Recolor{Color::red}, ell)));
    CHECK(keys_feasible(build(Mode::extended, Translate{Direction::down, 1},
                              Extend{Direction::up}, Recolor{Color::red}, ell)));
    CHECK(keys_feasible(build(Mode::restricted, Translate{Direction::down, 1},
                              Extend{Direction::up}, Recolor{Color::red}, ell)));
    CHECK(keys_feasible(build(Mode::extended, Translate{Direction::down, 1},
                              Extend{Direction::left}, Recolor{Color::red}, ell)));
    // The retellings compound: on the diagonal a clockwise rotation with an
    // upward extension and a downward step can be retold as a reflection with
    // a downward extension moved two steps left.
    CHECK_FALSE(keys_feasible(build(Mode::extended, Translate{Direction::down, 1},
                                    Rotate{RotationSense::cw}, Extend{Direction::up}, diagonal)));
    CHECK(keys_feasible(build(Mode::restricted, Translate{Direction::down, 1},
                              Rotate{RotationSense::cw}, Extend{Direction::up}, diagonal)));
}

TEST_CASE("rekeying keeps the assignment and yields feasible fresh keys") {
    Rng rng(99);
    VisualGrammar grammar = sample_grammar(rng, Mode::extended);
    auto assignment = grammar.assignment;
    auto old_signature = grammar_signature(grammar);
    bool changed = false;
    for (int i = 0; i < 5 && !changed; ++i) {
        rekey_grammar(rng, grammar);
        changed = grammar_signature(grammar) != old_signature;
    }
    CHECK(changed);
    CHECK(grammar.assignment == assignment);
    CHECK(keys_feasible(grammar));
}

TEST_CASE("every tier's sample carries exactly its cue set and the dictated output") {
    Rng rng(31);
    for (int round = 0; round < 4; ++round) {
        Mode mode = round % 2 == 0 ? Mode::restricted : Mode::extended;
        VisualGrammar grammar = sample_grammar(rng, mode);
        for (int t = 0; t < kTiers; ++t) {
            Tier tier = static_cast<Tier>(t);
            Sample sample = synthesize_sample(rng, grammar, tier);
            CHECK(sample.tier == tier);
            check_sample(sample, grammar);
        }
    }
}

TEST_CASE("every part of a sample's composite changes the grid") {
    Rng rng(32);
    VisualGrammar grammar = sample_grammar(rng, Mode::extended);
    for (int i = 0; i < 10; ++i) {
        Sample sample = synthesize_sample(rng, grammar, Tier::level2);
        ObjectRef target = find_target(sample);
        std::vector<StepTrace> trace;
        apply_composite(sample.input, target, tier_composite(grammar, Tier::level2), &trace);
        REQUIRE(trace.size() == 3);
        for (const StepTrace& step : trace) CHECK(step.changed);
    }
}

TEST_CASE("impossible keys exhaust the placement budget") {
    VisualGrammar grammar;
    grammar.mode = Mode::restricted;
    grammar.assignment = {TransformSpec{Reflect{Axis::horizontal}},
                          TransformSpec{Translate{Direction::down, 1}},
                          TransformSpec{Extend{Direction::up}}};
    const Shape square = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    grammar.shape_key = shape_library_index(square);
    grammar.color_key = Color::blue;
    grammar.neighbor_shape = 0;
    grammar.neighbor_color = Color::red;
    REQUIRE(grammar.shape_key >= 0);
    CHECK_FALSE(keys_feasible(grammar));
    Rng rng(5);
    CHECK_THROWS_AS(synthesize_sample(rng, grammar, Tier::primitive_shape),
                    GenerationExhausted);
}

TEST_CASE("study schedules follow the setup and the ablations") {
    using T = Tier;
    CHECK(study_schedule(Setup::three_shot, Ablation::none) ==
          std::vector<Tier>{T::level2, T::level2, T::level2});
    CHECK(study_schedule(Setup::systematicity, Ablation::none) ==
          std::vector<Tier>{T::primitive_shape, T::primitive_shape, T::primitive_color,
                            T::primitive_color, T::primitive_neighbor, T::primitive_neighbor,
                            T::level1_shape_color, T::level1_shape_color,
                            T::level1_shape_neighbor, T::level1_shape_neighbor,
                            T::level1_color_neighbor, T::level1_color_neighbor});
    CHECK(study_schedule(Setup::systematicity, Ablation::no_primitives) ==
          std::vector<Tier>{T::level1_shape_color, T::level1_shape_color,
                            T::level1_shape_neighbor, T::level1_shape_neighbor,
                            T::level1_color_neighbor, T::level1_color_neighbor});
    CHECK(study_schedule(Setup::systematicity, Ablation::no_level1) ==
          std::vector<Tier>{T::primitive_shape, T::primitive_shape, T::primitive_color,
                            T::primitive_color, T::primitive_neighbor,
                            T::primitive_neighbor});
}

TEST_CASE("systematicity episodes pair each tier with two distinct placements") {
    Rng rng(61);
    for (int round = 0; round < 5; ++round) {
        VisualGrammar grammar = sample_grammar(rng, Mode::extended);
        Episode episode = build_episode(rng, grammar, Setup::systematicity);
        auto schedule = study_schedule(Setup::systematicity, Ablation::none);
        REQUIRE(episode.study.size() == schedule.size());
        REQUIRE(episode.queries.size() == 10);
        for (size_t i = 0; i < schedule.size(); ++i) CHECK(episode.study[i].tier == schedule[i]);
        for (size_t i = 1; i < schedule.size(); i += 2) {
            ObjectRef first = find_target(episode.study[i - 1]);
            ObjectRef second = find_target(episode.study[i]);
            CHECK(first.bbox_min() != second.bbox_min());
            if (!tier_has(schedule[i], IndicatorKind::shape))
                CHECK(first.shape() != second.shape());
        }
        for (const Sample& sample : episode.study) check_sample(sample, grammar);
    }
}

TEST_CASE("three-shot episodes study three full compositions") {
    Rng rng(62);
    VisualGrammar grammar = sample_grammar(rng, Mode::restricted);
    Episode episode = build_episode(rng, grammar, Setup::three_shot);
    REQUIRE(episode.study.size() == 3);
    REQUIRE(episode.queries.size() == 10);
    for (const Sample& sample : episode.study) {
        CHECK(sample.tier == Tier::level2);
        check_sample(sample, grammar);
    }
}

TEST_CASE("queries satisfy all three cues, are pairwise distinct and stay explainable "
          "when the indicator is removed") {
    Rng rng(63);
    for (int round = 0; round < 3; ++round) {
        VisualGrammar grammar = sample_grammar(rng, round == 0 ? Mode::restricted : Mode::extended);
        Episode episode = build_episode(rng, grammar, Setup::systematicity);
        const auto& lib = shape_library();
        for (size_t q = 0; q < episode.queries.size(); ++q) {
            const Sample& query = episode.queries[q];
            CHECK(query.tier == Tier::level2);
            check_sample(query, grammar);
            for (size_t other = q + 1; other < episode.queries.size(); ++other)
                CHECK_FALSE(query.input == episode.queries[other].input);

            // dropping the indicator leaves a valid shape+color interpretation
            auto objects = extract_objects(query.input);
            REQUIRE(objects.size() == 2);
            ObjectRef target = find_target(query);
            const ObjectRef& indicator = objects[0] == target ? objects[1] : objects[0];
            CHECK(indicator.shape() == lib[static_cast<size_t>(grammar.neighbor_shape)]);
            Grid bare = erase(query.input, indicator);
            std::vector<StepTrace> trace;
            Grid level1 = apply_composite(bare, target,
                                          tier_composite(grammar, Tier::level1_shape_color),
                                          &trace);
            CHECK_FALSE(level1 == bare);
            for (const StepTrace& step : trace) CHECK(step.changed);
        }
    }
}

TEST_CASE("dataset generation is deterministic, deduplicated and ordered by id") {
    DatasetConfig config;
    config.master_seed = 4242;
    config.n_episodes = 40;
    config.mode = Mode::restricted;
    config.setup = Setup::systematicity;

    auto first = generate_dataset(config);
    auto second = generate_dataset(config);
    REQUIRE(first.size() == 40);
    CHECK(first == second);

    std::set<std::string> signatures;
    for (size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].id == i);
        signatures.insert(grammar_signature(first[i].grammar));
        CHECK(episode_to_json(first[i]) == episode_to_json(second[i]));
    }
    CHECK(signatures.size() == first.size());
}

TEST_CASE("a few hundred episodes already cover all ten triplets") {
    DatasetConfig config;
    config.master_seed = 99;
    config.n_episodes = 400;
    config.mode = Mode::restricted;
    config.setup = Setup::three_shot;
    std::array<int, 10> counts{};
    generate_dataset(config, [&](Episode&& episode) {
        counts[static_cast<size_t>(triplet_index(episode.grammar.triplet()))]++;
    });
    for (int count : counts) CHECK(count > 0);
}

TEST_CASE("ablated episodes carry the reduced study block") {
    DatasetConfig config;
    config.master_seed = 17;
    config.n_episodes = 3;
    config.setup = Setup::systematicity;
    config.ablation = Ablation::no_primitives;
    for (const Episode& episode : generate_dataset(config)) {
        REQUIRE(episode.study.size() == 6);
        for (const Sample& sample : episode.study)
            CHECK(tier_kinds(sample.tier).size() == 2);
        CHECK(episode.queries.size() == 10);
    }
    config.ablation = Ablation::no_level1;
    for (const Episode& episode : generate_dataset(config)) {
        REQUIRE(episode.study.size() == 6);
        for (const Sample& sample : episode.study)
            CHECK(tier_kinds(sample.tier).size() == 1);
    }
}

TEST_CASE("the split holds out two triplets and halves their episodes") {
    DatasetConfig config;
    config.master_seed = 2025;
    config.n_episodes = 400;
    config.mode = Mode::extended;
    config.setup = Setup::three_shot;
    auto episodes = generate_dataset(config);

    SplitSpec spec = split_dataset(episodes, 1860);
    REQUIRE(spec.train_triplets.size() == 8);
    REQUIRE(spec.eval_triplets.size() == 2);
    std::set<int> all(spec.train_triplets.begin(), spec.train_triplets.end());
    all.insert(spec.eval_triplets.begin(), spec.eval_triplets.end());
    CHECK(all.size() == 10);

    CHECK(spec.train_ids.size() + spec.val_ids.size() + spec.test_ids.size() == episodes.size());
    CHECK(spec.val_ids.size() >= spec.test_ids.size());
    CHECK(spec.val_ids.size() - spec.test_ids.size() <= 1);

    double fraction = static_cast<double>(spec.train_ids.size()) / episodes.size();
    CHECK(fraction > 0.70);
    CHECK(fraction < 0.90);

    auto is_eval = [&](int triplet) {
        return std::find(spec.eval_triplets.begin(), spec.eval_triplets.end(), triplet) !=
               spec.eval_triplets.end();
    };
    size_t held_out = 0;
    for (const Episode& episode : episodes) {
        int triplet = triplet_index(episode.grammar.triplet());
        if (is_eval(triplet)) {
            const auto& ids = held_out % 2 == 0 ? spec.val_ids : spec.test_ids;
            CHECK(std::find(ids.begin(), ids.end(), episode.id) != ids.end());
            ++held_out;
        } else {
            CHECK(std::find(spec.train_ids.begin(), spec.train_ids.end(), episode.id) !=
                  spec.train_ids.end());
        }
    }

    // same seed, same partition; different seed, usually different
    CHECK(make_split(1860).eval_triplets == spec.eval_triplets);
    bool any_other = false;
    for (uint64_t seed = 1; seed <= 5 && !any_other; ++seed)
        any_other = make_split(seed).eval_triplets != spec.eval_triplets;
    CHECK(any_other);
}

TEST_CASE("episode files round trip byte-for-byte") {
    DatasetConfig config;
    config.master_seed = 7;
    config.n_episodes = 5;
    config.setup = Setup::systematicity;
    config.mode = Mode::extended;
    auto episodes = generate_dataset(config);

    std::string path = temp_path("carc_episodes_test.jsonl");
    write_episodes(path, episodes);
    auto loaded = read_episodes(path);
    std::filesystem::remove(path);
    REQUIRE(loaded.size() == episodes.size());
    CHECK(loaded == episodes);
    for (size_t i = 0; i < episodes.size(); ++i)
        CHECK(episode_to_json(loaded[i]) == episode_to_json(episodes[i]));
}

TEST_CASE("grammar, split and prediction records round trip through json") {
    Rng rng(3);
    VisualGrammar grammar = sample_grammar(rng, Mode::extended);
    CHECK(grammar_from_json(grammar_to_json(grammar)) == grammar);

    SplitSpec spec = make_split(5);
    spec.train_ids = {0, 2, 5};
    spec.val_ids = {1};
    spec.test_ids = {3, 4};
    std::string path = temp_path("carc_split_test.json");
    write_split(path, spec);
    SplitSpec reloaded = read_split(path);
    std::filesystem::remove(path);
    CHECK(reloaded == spec);

    PredictionRecord with_grid{7, 3, paint(Grid{}, make_object({{0, 0}, {0, 1}}, {4, 4},
                                                               Color::cyan))};
    PredictionRecord malformed{8, 0, std::nullopt};
    CHECK(prediction_from_json(prediction_to_json(with_grid)) == with_grid);
    CHECK(prediction_from_json(prediction_to_json(malformed)) == malformed);
    CHECK_THROWS_AS(prediction_from_json("not json"), MismatchError);
    CHECK_THROWS_AS(episode_from_json("{}"), MismatchError);
    CHECK_THROWS_AS(read_episodes(temp_path("carc_does_not_exist.jsonl")), IoError);
}

TEST_CASE("the static corpus trains on components and tests on the composition") {
    StaticCorpus corpus = generate_static_corpus(77, 130, Mode::restricted);
    REQUIRE(corpus.pairs.size() == 130);

    size_t train = 0, val = 0, test = 0;
    for (size_t i = 0; i < corpus.pairs.size(); ++i) {
        const StaticPair& pair = corpus.pairs[i];
        if (pair.split == "train") ++train;
        if (pair.split == "val") ++val;
        if (pair.split == "test") ++test;
        if (pair.split == "test") {
            CHECK(pair.sample.tier == Tier::level2);
        } else {
            CHECK(pair.sample.tier != Tier::level2);
        }
        check_sample(pair.sample, corpus.grammar);
    }
    CHECK(train == 90);
    CHECK(val == 20);
    CHECK(test == 20);

    // level-2 appears in no training pair, so its triplet is unseen there
    for (const StaticPair& pair : corpus.pairs)
        if (pair.split != "test") CHECK(tier_kinds(pair.sample.tier).size() <= 2);

    StaticCorpus again = generate_static_corpus(77, 130, Mode::restricted);
    CHECK(grammar_to_json(again.grammar) == grammar_to_json(corpus.grammar));
    REQUIRE(again.pairs.size() == corpus.pairs.size());
    for (size_t i = 0; i < corpus.pairs.size(); ++i) {
        CHECK(again.pairs[i].sample == corpus.pairs[i].sample);
        CHECK(again.pairs[i].split == corpus.pairs[i].split);
    }

    std::string path = temp_path("carc_static_corpus_test.jsonl");
    write_static_corpus(path, corpus);
    StaticCorpus loaded = read_static_corpus(path);
    std::filesystem::remove(path);
    CHECK(grammar_to_json(loaded.grammar) == grammar_to_json(corpus.grammar));
    REQUIRE(loaded.pairs.size() == corpus.pairs.size());
    for (size_t i = 0; i < corpus.pairs.size(); ++i) {
        CHECK(loaded.pairs[i].sample == corpus.pairs[i].sample);
        CHECK(loaded.pairs[i].split == corpus.pairs[i].split);
    }
}
