#include <carc/generator.hpp>

#include <algorithm>
#include <unordered_set>

#include <carc/errors.hpp>
#include <carc/shapes.hpp>
#include <carc/transform.hpp>

namespace carc {

std::string setup_name(Setup setup) {
    return setup == Setup::three_shot ? "three_shot" : "systematicity";
}

Setup setup_from_name(const std::string& name) {
    if (name == "three_shot") return Setup::three_shot;
    if (name == "systematicity") return Setup::systematicity;
    throw MismatchError("unknown setup: " + name);
}

std::string ablation_name(Ablation ablation) {
    switch (ablation) {
        case Ablation::none: return "none";
        case Ablation::no_primitives: return "no_primitives";
        case Ablation::no_level1: return "no_level1";
    }
    return "?";
}

Ablation ablation_from_name(const std::string& name) {
    if (name == "none") return Ablation::none;
    if (name == "no_primitives") return Ablation::no_primitives;
    if (name == "no_level1") return Ablation::no_level1;
    throw MismatchError("unknown ablation: " + name);
}

std::vector<Tier> study_schedule(Setup setup, Ablation ablation) {
    using T = Tier;
    if (setup == Setup::three_shot) return {T::level2, T::level2, T::level2};
    std::vector<Tier> primitives = {T::primitive_shape,    T::primitive_shape,
                                    T::primitive_color,    T::primitive_color,
                                    T::primitive_neighbor, T::primitive_neighbor};
    std::vector<Tier> level1 = {T::level1_shape_color,    T::level1_shape_color,
                                T::level1_shape_neighbor, T::level1_shape_neighbor,
                                T::level1_color_neighbor, T::level1_color_neighbor};
    if (ablation == Ablation::no_primitives) return level1;
    if (ablation == Ablation::no_level1) return primitives;
    primitives.insert(primitives.end(), level1.begin(), level1.end());
    return primitives;
}

namespace {

Coord bbox_extent(const Shape& shape) {
    Coord extent{0, 0};
    for (Coord c : shape) {
        extent.row = std::max(extent.row, c.row);
        extent.col = std::max(extent.col, c.col);
    }
    return extent;
}

Coord random_anchor(Rng& rng, const Shape& shape) {
    Coord extent = bbox_extent(shape);
    return {static_cast<int>(rng.uniform_int(0, Grid::kSide - 1 - extent.row)),
            static_cast<int>(rng.uniform_int(0, Grid::kSide - 1 - extent.col))};
}

bool cells_overlap(const ObjectRef& a, const ObjectRef& b) {
    for (Coord c : a.cells)
        if (std::binary_search(b.cells.begin(), b.cells.end(), c)) return true;
    return false;
}

// The grid must extract to exactly the given objects: placement or
// transformation outcomes that merge, split or otherwise distort an object
// are rejected by the caller.
bool extraction_matches(const Grid& grid, const ObjectRef& first, const ObjectRef* second) {
    auto objects = extract_objects(grid);
    if (objects.size() != (second ? 2u : 1u)) return false;
    if (!second) return objects[0] == first;
    return (objects[0] == first && objects[1] == *second) ||
           (objects[0] == *second && objects[1] == first);
}

// Every proper sub-composite (each single cue transformation and each pair)
// must be applicable to the input, so a prediction can later be compared
// against any partial application of the grammar.
bool subcomposites_valid(const Grid& input, const ObjectRef& target, const VisualGrammar& grammar) {
    for (int mask = 1; mask < 7; ++mask) {
        Composite specs;
        for (int k = 0; k < kIndicatorKinds; ++k)
            if (mask & (1 << k)) specs.push_back(grammar.assignment[k]);
        if (!composite_valid(input, target, specs)) return false;
    }
    return true;
}

struct Synthesized {
    Sample sample;
    Coord target_anchor;
    int target_shape = -1;
};

Synthesized synthesize(Rng& rng, const VisualGrammar& grammar, Tier tier, const SlotAvoid& avoid) {
    const auto& lib = shape_library();
    const Composite composite = tier_composite(grammar, tier);
    const bool forced_shape = tier_has(tier, IndicatorKind::shape);
    const bool forced_color = tier_has(tier, IndicatorKind::color);
    const bool with_indicator = tier_has(tier, IndicatorKind::neighbor);

    std::vector<int> shape_pool =
        forced_shape ? std::vector<int>{grammar.shape_key} : free_shape_pool(grammar);
    if (!forced_shape && avoid.shape)
        std::erase(shape_pool, *avoid.shape);
    std::vector<Color> color_pool =
        forced_color ? std::vector<Color>{grammar.color_key} : free_color_pool(grammar);
    if (shape_pool.empty() || color_pool.empty())
        throw GenerationExhausted("empty attribute pool for tier " + tier_name(tier));

    const Shape& indicator_shape = lib[grammar.neighbor_shape];

    for (int attempt = 0; attempt < kPlacementBudget; ++attempt) {
        int shape_idx = rng.pick(shape_pool);
        Color color = rng.pick(color_pool);
        Coord anchor = random_anchor(rng, lib[shape_idx]);
        if (avoid.anchor && anchor == *avoid.anchor) continue;

        ObjectRef target = make_object(lib[shape_idx], anchor, color);
        Grid input = paint(Grid{}, target);
        ObjectRef indicator;
        if (with_indicator) {
            indicator = make_object(indicator_shape, random_anchor(rng, indicator_shape),
                                    grammar.neighbor_color);
            if (cells_overlap(indicator, target)) continue;
            input = paint(input, indicator);
        }
        if (!extraction_matches(input, target, with_indicator ? &indicator : nullptr)) continue;

        std::vector<StepTrace> trace;
        ObjectRef transformed;
        Grid output;
        try {
            output = apply_composite(input, target, composite, &trace, &transformed);
        } catch (const InvalidTransform&) {
            continue;
        }
        bool all_visible = std::all_of(trace.begin(), trace.end(),
                                       [](const StepTrace& step) { return step.changed; });
        if (!all_visible || output == input) continue;
        if (!extraction_matches(output, transformed, with_indicator ? &indicator : nullptr))
            continue;
        if (tier == Tier::level2) {
            if (!subcomposites_valid(input, target, grammar)) continue;
            // Erasing the indicator must leave a well-formed shape+color
            // sample: the error classifier compares predictions against that
            // partial application, so each of its steps must still visibly
            // change the bare grid.
            Grid bare = erase(input, indicator);
            std::vector<StepTrace> sub_trace;
            Grid level1;
            try {
                level1 = apply_composite(bare, target,
                                         tier_composite(grammar, Tier::level1_shape_color),
                                         &sub_trace);
            } catch (const InvalidTransform&) {
                continue;
            }
            bool sub_visible = std::all_of(sub_trace.begin(), sub_trace.end(),
                                           [](const StepTrace& step) { return step.changed; });
            if (!sub_visible || level1 == bare) continue;
        }

        return {Sample{input, output, tier}, anchor, shape_idx};
    }
    throw GenerationExhausted("placement budget exhausted for tier " + tier_name(tier));
}

}  // namespace

Sample synthesize_sample(Rng& rng, const VisualGrammar& grammar, Tier tier,
                         const SlotAvoid& avoid) {
    return synthesize(rng, grammar, tier, avoid).sample;
}

Episode build_episode(Rng& rng, const VisualGrammar& grammar, Setup setup, Ablation ablation) {
    Episode episode;
    episode.grammar = grammar;
    episode.setup = setup;
    episode.ablation = ablation;

    std::vector<Tier> schedule = study_schedule(setup, ablation);
    std::optional<Synthesized> previous;
    for (size_t i = 0; i < schedule.size(); ++i) {
        SlotAvoid avoid;
        if (previous && i % 2 == 1 && schedule[i] == schedule[i - 1]) {
            avoid.anchor = previous->target_anchor;
            avoid.shape = previous->target_shape;
        }
        previous = synthesize(rng, grammar, schedule[i], avoid);
        episode.study.push_back(previous->sample);
    }

    for (int q = 0; q < kQueriesPerEpisode; ++q) {
        for (int tries = 0;; ++tries) {
            if (tries >= 100)
                throw GenerationExhausted("could not draw a fresh query input");
            Sample sample = synthesize(rng, grammar, Tier::level2, {}).sample;
            auto same_input = [&](const Sample& other) { return other.input == sample.input; };
            bool fresh =
                std::none_of(episode.queries.begin(), episode.queries.end(), same_input) &&
                std::none_of(episode.study.begin(), episode.study.end(), same_input);
            if (fresh) {
                episode.queries.push_back(std::move(sample));
                break;
            }
        }
    }
    return episode;
}

void generate_dataset(const DatasetConfig& config, const std::function<void(Episode&&)>& sink) {
    std::unordered_set<std::string> signatures;
    signatures.reserve(static_cast<size_t>(std::max(config.n_episodes, 0)));

    for (int index = 0; index < config.n_episodes; ++index) {
        Rng rng(derive_seed(config.master_seed, static_cast<uint64_t>(index)));

        VisualGrammar grammar = sample_grammar(rng, config.mode);
        for (int attempt = 0; signatures.contains(grammar_signature(grammar)); ++attempt) {
            if (attempt >= 1000)
                throw DuplicateBudgetExceeded("could not find an unused grammar signature");
            grammar = sample_grammar(rng, config.mode);
        }

        Episode episode;
        for (int attempt = 0;; ++attempt) {
            try {
                episode = build_episode(rng, grammar, config.setup, config.ablation);
                break;
            } catch (const GenerationExhausted&) {
                if (attempt >= 20) throw;
                int rekeys = 0;
                do {
                    if (++rekeys > 1000)
                        throw DuplicateBudgetExceeded("could not rekey to an unused signature");
                    rekey_grammar(rng, grammar);
                } while (signatures.contains(grammar_signature(grammar)));
            }
        }
        signatures.insert(grammar_signature(grammar));
        episode.id = static_cast<uint64_t>(index);
        sink(std::move(episode));
    }
}

std::vector<Episode> generate_dataset(const DatasetConfig& config) {
    std::vector<Episode> episodes;
    episodes.reserve(static_cast<size_t>(std::max(config.n_episodes, 0)));
    generate_dataset(config, [&](Episode&& episode) { episodes.push_back(std::move(episode)); });
    return episodes;
}

StaticCorpus generate_static_corpus(uint64_t master_seed, int n, Mode mode) {
    if (n < 41) throw UsageError("static corpus needs at least 41 pairs");
    static const std::vector<Tier> component_cycle = {
        Tier::primitive_shape,     Tier::primitive_color,       Tier::primitive_neighbor,
        Tier::level1_shape_color,  Tier::level1_shape_neighbor, Tier::level1_color_neighbor};

    StaticCorpus corpus;
    Rng grammar_rng(derive_seed(master_seed, 0));
    corpus.grammar = sample_grammar(grammar_rng, mode);

    corpus.pairs.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        bool test = i >= n - 20;
        bool val = !test && i >= n - 40;
        Tier tier = test ? Tier::level2 : component_cycle[static_cast<size_t>(i) % 6];
        Rng rng(derive_seed(master_seed, static_cast<uint64_t>(i) + 1));
        corpus.pairs.push_back(
            {synthesize_sample(rng, corpus.grammar, tier), test ? "test" : (val ? "val" : "train")});
    }
    return corpus;
}

}  // namespace carc
