#include <carc/solver.hpp>

#include <algorithm>
#include <array>
#include <optional>
#include <string>

#include <carc/errors.hpp>
#include <carc/shapes.hpp>

namespace carc {

namespace {

std::vector<Composite> enumerate_composites(Mode mode) {
    std::vector<TransformFamily> families = {
        TransformFamily::translation, TransformFamily::rotation, TransformFamily::reflection,
        TransformFamily::extension, TransformFamily::color_change};
    std::sort(families.begin(), families.end(), [](TransformFamily a, TransformFamily b) {
        return canonical_rank(a) < canonical_rank(b);
    });
    std::vector<std::vector<TransformSpec>> spaces;
    spaces.reserve(families.size());
    for (TransformFamily family : families) spaces.push_back(family_param_space(family, mode));

    std::vector<Composite> out;
    const int n = static_cast<int>(families.size());
    for (int i = 0; i < n; ++i)
        for (const TransformSpec& a : spaces[i]) out.push_back({a});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (const TransformSpec& a : spaces[i])
                for (const TransformSpec& b : spaces[j]) out.push_back({a, b});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (const TransformSpec& a : spaces[i])
                    for (const TransformSpec& b : spaces[j])
                        for (const TransformSpec& c : spaces[k]) out.push_back({a, b, c});
    return out;
}

const std::vector<Composite>& composites_for(Mode mode) {
    static const std::vector<Composite> restricted = enumerate_composites(Mode::restricted);
    static const std::vector<Composite> extended = enumerate_composites(Mode::extended);
    return mode == Mode::restricted ? restricted : extended;
}

struct StudyFacts {
    std::vector<IndicatorKind> kinds;
    ObjectRef target;
    std::optional<ObjectRef> bystander;
    std::vector<Composite> candidates;
};

// The changed object carries the transformation; an unchanged companion, when
// present, is the neighbor indicator.
void split_objects(const Sample& sample, ObjectRef& target, std::optional<ObjectRef>& bystander) {
    auto in_objects = extract_objects(sample.input);
    auto out_objects = extract_objects(sample.output);
    std::optional<ObjectRef> changed;
    for (const ObjectRef& object : in_objects) {
        if (std::find(out_objects.begin(), out_objects.end(), object) != out_objects.end()) {
            if (bystander)
                throw InconsistentGrammar("study sample has several unchanged objects");
            bystander = object;
        } else {
            if (changed) throw InconsistentGrammar("study sample has several changed objects");
            changed = object;
        }
    }
    if (!changed) throw InconsistentGrammar("study sample shows no transformation");
    target = *changed;
}

StudyFacts gather_facts(const Sample& sample, Mode mode) {
    StudyFacts facts;
    facts.kinds = tier_kinds(sample.tier);
    split_objects(sample, facts.target, facts.bystander);
    std::vector<TransformCandidate> explanations;
    try {
        explanations = infer_transform(sample.input, sample.output, mode);
    } catch (const NoExplanation& e) {
        throw InconsistentGrammar(std::string("study sample is unexplainable: ") + e.what());
    }
    for (const TransformCandidate& candidate : explanations)
        if (candidate.composite.size() == facts.kinds.size())
            facts.candidates.push_back(candidate.composite);
    if (facts.candidates.empty())
        throw InconsistentGrammar("no explanation uses one transformation per active cue");
    return facts;
}

int library_index_or_throw(const Shape& shape, const char* what) {
    int index = shape_library_index(shape);
    if (index < 0) throw InconsistentGrammar(std::string(what) + " is not a library shape");
    return index;
}

template <typename T>
void pin(std::optional<T>& slot, const T& value, const char* what) {
    if (slot && *slot != value)
        throw InconsistentGrammar(std::string("study samples disagree on the ") + what);
    slot = value;
}

}  // namespace

std::vector<TransformCandidate> infer_transform(const Grid& input, const Grid& output, Mode mode) {
    if (input == output) throw NoExplanation("input and output grids are identical");
    std::vector<TransformCandidate> out;
    std::vector<StepTrace> trace;
    for (const ObjectRef& object : extract_objects(input)) {
        for (const Composite& composite : composites_for(mode)) {
            try {
                if (apply_composite(input, object, composite, &trace) != output) continue;
                // Generated samples only ever use composites whose every step
                // visibly changes the grid, so explanations padded with no-op
                // steps (recoloring to the current color, reflecting a
                // symmetric object) are spurious.
                bool all_visible = std::all_of(trace.begin(), trace.end(),
                                               [](const StepTrace& s) { return s.changed; });
                if (all_visible) out.push_back({composite, object});
            } catch (const InvalidTransform&) {
            }
        }
    }
    if (out.empty())
        throw NoExplanation("no composite over the mode's parameter space explains the pair");
    return out;
}

VisualGrammar induce_grammar(const Episode& episode, Mode mode) {
    if (episode.study.empty()) throw InconsistentGrammar("episode has no study samples");

    std::vector<StudyFacts> facts;
    facts.reserve(episode.study.size());
    for (const Sample& sample : episode.study) facts.push_back(gather_facts(sample, mode));

    std::optional<int> shape_key;
    std::optional<Color> color_key;
    std::optional<int> neighbor_shape;
    std::optional<Color> neighbor_color;
    for (const StudyFacts& f : facts) {
        for (IndicatorKind kind : f.kinds) {
            if (kind == IndicatorKind::shape)
                pin(shape_key, library_index_or_throw(f.target.shape(), "target shape"),
                    "shape key");
            if (kind == IndicatorKind::color) pin(color_key, f.target.color, "color key");
            if (kind == IndicatorKind::neighbor) {
                if (!f.bystander)
                    throw InconsistentGrammar("neighbor-cue sample lacks an indicator object");
                pin(neighbor_shape,
                    library_index_or_throw(f.bystander->shape(), "indicator shape"),
                    "neighbor shape");
                pin(neighbor_color, f.bystander->color, "neighbor color");
            }
        }
    }
    if (!shape_key || !color_key || !neighbor_shape || !neighbor_color)
        throw AmbiguousGrammar("study samples never exercise one of the indicator kinds");

    // Per-kind options, narrowed by every single-cue sample.
    std::array<std::vector<TransformSpec>, kIndicatorKinds> options;
    options.fill(all_specs(mode));
    for (const StudyFacts& f : facts) {
        if (f.kinds.size() != 1) continue;
        auto& allowed = options[static_cast<size_t>(f.kinds.front())];
        std::vector<TransformSpec> kept;
        for (const TransformSpec& spec : allowed)
            if (std::find(f.candidates.begin(), f.candidates.end(), Composite{spec}) !=
                f.candidates.end())
                kept.push_back(spec);
        allowed = kept;
        if (allowed.empty())
            throw InconsistentGrammar("single-cue samples eliminate every transformation for " +
                                      indicator_name(f.kinds.front()));
    }

    std::vector<VisualGrammar> survivors;
    for (const TransformSpec& s : options[0]) {
        for (const TransformSpec& c : options[1]) {
            if (family_of(c) == family_of(s)) continue;
            for (const TransformSpec& n : options[2]) {
                if (family_of(n) == family_of(s) || family_of(n) == family_of(c)) continue;
                VisualGrammar grammar;
                grammar.assignment = {s, c, n};
                grammar.shape_key = *shape_key;
                grammar.color_key = *color_key;
                grammar.neighbor_shape = *neighbor_shape;
                grammar.neighbor_color = *neighbor_color;
                grammar.mode = mode;
                bool consistent = true;
                for (const StudyFacts& f : facts) {
                    Composite expected;
                    for (IndicatorKind kind : f.kinds)
                        expected.push_back(grammar.spec_for(kind));
                    expected = canonical_order(expected);
                    if (std::find(f.candidates.begin(), f.candidates.end(), expected) ==
                        f.candidates.end()) {
                        consistent = false;
                        break;
                    }
                }
                if (consistent) survivors.push_back(grammar);
            }
        }
    }

    if (survivors.empty()) throw InconsistentGrammar("no grammar explains all study samples");
    if (survivors.size() == 1) return survivors.front();

    // Level-2 study samples constrain the assignment only up to permutation,
    // and the full composite is permutation-invariant, so a unique composite
    // is as determined as a three-shot episode can be.
    bool same_composite = true;
    Composite first = canonical_order(
        {survivors[0].assignment[0], survivors[0].assignment[1], survivors[0].assignment[2]});
    for (const VisualGrammar& grammar : survivors)
        same_composite &=
            canonical_order({grammar.assignment[0], grammar.assignment[1],
                             grammar.assignment[2]}) == first;
    if (episode.setup == Setup::three_shot && same_composite) return survivors.front();

    std::string listing;
    for (const VisualGrammar& grammar : survivors) {
        if (!listing.empty()) listing += " | ";
        listing += grammar_signature(grammar);
    }
    throw AmbiguousGrammar("several grammars explain the study samples: " + listing);
}

Grid solve_query(const VisualGrammar& grammar, const Grid& query_input) {
    const auto& lib = shape_library();
    if (grammar.shape_key < 0 || grammar.shape_key >= static_cast<int>(lib.size()) ||
        grammar.neighbor_shape < 0 || grammar.neighbor_shape >= static_cast<int>(lib.size()))
        throw MismatchError("grammar shape keys out of library range");

    std::optional<ObjectRef> target;
    bool indicator_present = false;
    for (const ObjectRef& object : extract_objects(query_input)) {
        if (object.color == grammar.color_key &&
            object.shape() == lib[static_cast<size_t>(grammar.shape_key)]) {
            if (target) throw NoTargetError("several objects match the indicator keys");
            target = object;
        }
        if (object.color == grammar.neighbor_color &&
            object.shape() == lib[static_cast<size_t>(grammar.neighbor_shape)])
            indicator_present = true;
    }
    if (!target) throw NoTargetError("no object matches the shape and color keys");
    if (!indicator_present) throw NoTargetError("the neighbor indicator object is absent");
    return apply_composite(query_input, *target, tier_composite(grammar, Tier::level2));
}

std::vector<PredictionRecord> solve_episodes(const std::vector<Episode>& episodes, Mode mode) {
    std::vector<PredictionRecord> out;
    for (const Episode& episode : episodes) {
        VisualGrammar grammar = induce_grammar(episode, mode);
        for (size_t q = 0; q < episode.queries.size(); ++q) {
            PredictionRecord record;
            record.episode_id = episode.id;
            record.query_index = static_cast<int>(q);
            try {
                record.prediction = solve_query(grammar, episode.queries[q].input);
            } catch (const CarcError&) {
                record.prediction = std::nullopt;
            }
            out.push_back(record);
        }
    }
    return out;
}

}  // namespace carc
