#pragma once

#include <array>
#include <string>
#include <vector>

#include <carc/grid.hpp>
#include <carc/rng.hpp>
#include <carc/transform.hpp>

namespace carc {

// The three cue kinds an input object can carry. Each grammar binds one
// transformation to each kind.
enum class IndicatorKind { shape = 0, color = 1, neighbor = 2 };
inline constexpr int kIndicatorKinds = 3;

std::string indicator_name(IndicatorKind kind);
IndicatorKind indicator_from_name(const std::string& name);

// Which cue subset the target of a sample satisfies.
enum class Tier {
    primitive_shape,
    primitive_color,
    primitive_neighbor,
    level1_shape_color,
    level1_shape_neighbor,
    level1_color_neighbor,
    level2,
};
inline constexpr int kTiers = 7;

std::string tier_name(Tier tier);
Tier tier_from_name(const std::string& name);

// Active cue kinds of a tier, in IndicatorKind order.
std::vector<IndicatorKind> tier_kinds(Tier tier);
bool tier_has(Tier tier, IndicatorKind kind);

// A visual interpretation grammar: one parameterized transformation per cue
// kind (three pairwise-distinct families) plus the keys that trigger them.
// The neighbor cue is a second object whose presence marks the target; it
// never shares the shape key or the color key.
struct VisualGrammar {
    std::array<TransformSpec, kIndicatorKinds> assignment;
    int shape_key = 0;                    // index into shape_library()
    Color color_key = Color::red;
    int neighbor_shape = 1;               // indicator object's shape
    Color neighbor_color = Color::orange;  // indicator object's color
    Mode mode = Mode::restricted;

    const TransformSpec& spec_for(IndicatorKind kind) const {
        return assignment[static_cast<int>(kind)];
    }
    std::array<TransformFamily, 3> triplet() const;

    bool operator==(const VisualGrammar&) const = default;
};

// All C(5,3) = 10 unordered family triplets, each sorted in enum order,
// listed lexicographically.
const std::vector<std::array<TransformFamily, 3>>& family_triplets();

int triplet_index(const std::array<TransformFamily, 3>& triplet);

// "translation+rotation+reflection" style, families in enum order.
std::string triplet_label(const std::array<TransformFamily, 3>& triplet);

// The composite a tier dictates, specs in canonical application order.
Composite tier_composite(const VisualGrammar& grammar, Tier tier);

// Dataset-wide uniqueness signature: keys plus the full cue assignment.
std::string grammar_signature(const VisualGrammar& grammar);

// Target shapes legal for tiers that do not force the shape key. Excludes
// the shape key, the indicator shape, and shapes whose quarter rotation
// equals a translation of themselves whenever rotation is in the triplet
// (such grids would not pin down which transformation was applied).
std::vector<int> free_shape_pool(const VisualGrammar& grammar);

// Target colors legal for tiers that do not force the color key. Excludes
// the color key, the indicator color, and any recoloring destination in the
// triplet (recoloring must stay visible).
std::vector<Color> free_color_pool(const VisualGrammar& grammar);

// True when every tier composite can produce a change visible part by part
// on the keyed attributes (and on at least two library shapes where the
// shape is free).
bool keys_feasible(const VisualGrammar& grammar);

// Uniform triplet, uniform family-to-kind assignment, uniform parameters,
// then keys drawn until keys_feasible holds.
VisualGrammar sample_grammar(Rng& rng, Mode mode);

// Redraws the keys of an existing grammar, keeping triplet, assignment and
// parameters. Used when sample synthesis runs out of placement attempts.
void rekey_grammar(Rng& rng, VisualGrammar& grammar);

}  // namespace carc
