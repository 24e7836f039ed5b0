#pragma once

#include <vector>

#include <carc/episode.hpp>
#include <carc/grammar.hpp>
#include <carc/grid.hpp>
#include <carc/metrics.hpp>
#include <carc/transform.hpp>

namespace carc {

// One way to explain an input/output pair: this composite applied to this
// input object reproduces the output exactly.
struct TransformCandidate {
    Composite composite;
    ObjectRef target;

    bool operator==(const TransformCandidate&) const = default;
};

// Enumerates every explanation of the pair: each object of the input crossed
// with every composite of 1-3 distinct-family parts over the mode's full
// parameter space (canonical application order). Throws NoExplanation when
// nothing fits, including the degenerate identical pair.
std::vector<TransformCandidate> infer_transform(const Grid& input, const Grid& output, Mode mode);

// Recovers the grammar that generated the episode from its study samples
// alone by intersecting infer_transform explanations across the tier
// schedule. Samples with a single cue pin that indicator's transformation
// directly; multi-cue samples constrain the remaining assignments jointly,
// and every surviving grammar is re-simulated against all study samples.
// Indicator keys are read off the samples' target and bystander objects.
// Throws AmbiguousGrammar when several grammars survive (three-shot episodes
// determine the assignment only up to permutation, so there the composite
// must be unique instead), InconsistentGrammar when none does.
VisualGrammar induce_grammar(const Episode& episode, Mode mode);

// Applies the grammar's full composite to the unique query object matching
// the shape and color keys. Throws NoTargetError when no object matches.
Grid solve_query(const VisualGrammar& grammar, const Grid& query_input);

// Answers every query of every episode with the induced grammar.
std::vector<PredictionRecord> solve_episodes(const std::vector<Episode>& episodes, Mode mode);

}  // namespace carc
