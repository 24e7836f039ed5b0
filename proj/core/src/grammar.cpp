#include <carc/grammar.hpp>

#include <algorithm>
#include <numeric>

#include <carc/errors.hpp>
#include <carc/shapes.hpp>

namespace carc {

std::string indicator_name(IndicatorKind kind) {
    switch (kind) {
        case IndicatorKind::shape: return "shape";
        case IndicatorKind::color: return "color";
        case IndicatorKind::neighbor: return "neighbor";
    }
    return "?";
}

IndicatorKind indicator_from_name(const std::string& name) {
    if (name == "shape") return IndicatorKind::shape;
    if (name == "color") return IndicatorKind::color;
    if (name == "neighbor") return IndicatorKind::neighbor;
    throw MismatchError("unknown indicator kind: " + name);
}

std::string tier_name(Tier tier) {
    switch (tier) {
        case Tier::primitive_shape: return "primitive_shape";
        case Tier::primitive_color: return "primitive_color";
        case Tier::primitive_neighbor: return "primitive_neighbor";
        case Tier::level1_shape_color: return "level1_shape_color";
        case Tier::level1_shape_neighbor: return "level1_shape_neighbor";
        case Tier::level1_color_neighbor: return "level1_color_neighbor";
        case Tier::level2: return "level2";
    }
    return "?";
}

Tier tier_from_name(const std::string& name) {
    for (int t = 0; t < kTiers; ++t)
        if (tier_name(static_cast<Tier>(t)) == name) return static_cast<Tier>(t);
    throw MismatchError("unknown tier: " + name);
}

std::vector<IndicatorKind> tier_kinds(Tier tier) {
    using K = IndicatorKind;
    switch (tier) {
        case Tier::primitive_shape: return {K::shape};
        case Tier::primitive_color: return {K::color};
        case Tier::primitive_neighbor: return {K::neighbor};
        case Tier::level1_shape_color: return {K::shape, K::color};
        case Tier::level1_shape_neighbor: return {K::shape, K::neighbor};
        case Tier::level1_color_neighbor: return {K::color, K::neighbor};
        case Tier::level2: return {K::shape, K::color, K::neighbor};
    }
    return {};
}

bool tier_has(Tier tier, IndicatorKind kind) {
    auto kinds = tier_kinds(tier);
    return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

std::array<TransformFamily, 3> VisualGrammar::triplet() const {
    std::array<TransformFamily, 3> out = {family_of(assignment[0]), family_of(assignment[1]),
                                          family_of(assignment[2])};
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<std::array<TransformFamily, 3>>& family_triplets() {
    static const std::vector<std::array<TransformFamily, 3>> triplets = [] {
        std::vector<std::array<TransformFamily, 3>> out;
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b)
                for (int c = b + 1; c < 5; ++c)
                    out.push_back({static_cast<TransformFamily>(a), static_cast<TransformFamily>(b),
                                   static_cast<TransformFamily>(c)});
        return out;
    }();
    return triplets;
}

int triplet_index(const std::array<TransformFamily, 3>& triplet) {
    auto sorted = triplet;
    std::sort(sorted.begin(), sorted.end());
    const auto& all = family_triplets();
    for (size_t i = 0; i < all.size(); ++i)
        if (all[i] == sorted) return static_cast<int>(i);
    throw MismatchError("not a family triplet: " + triplet_label(triplet));
}

std::string triplet_label(const std::array<TransformFamily, 3>& triplet) {
    auto sorted = triplet;
    std::sort(sorted.begin(), sorted.end());
    return family_name(sorted[0]) + "+" + family_name(sorted[1]) + "+" + family_name(sorted[2]);
}

Composite tier_composite(const VisualGrammar& grammar, Tier tier) {
    Composite specs;
    for (IndicatorKind kind : tier_kinds(tier)) specs.push_back(grammar.spec_for(kind));
    return canonical_order(specs);
}

std::string grammar_signature(const VisualGrammar& grammar) {
    std::string out = "shape=" + std::to_string(grammar.shape_key);
    out += ";color=";
    out += color_name(grammar.color_key);
    out += ";neighbor=" + std::to_string(grammar.neighbor_shape) + ":";
    out += color_name(grammar.neighbor_color);
    for (int k = 0; k < kIndicatorKinds; ++k) {
        out += ";" + indicator_name(static_cast<IndicatorKind>(k)) + "=";
        out += spec_signature(grammar.assignment[k]);
    }
    return out;
}

std::vector<int> free_shape_pool(const VisualGrammar& grammar) {
    auto triplet = grammar.triplet();
    bool has_rotation =
        std::find(triplet.begin(), triplet.end(), TransformFamily::rotation) != triplet.end();
    bool has_reflection =
        std::find(triplet.begin(), triplet.end(), TransformFamily::reflection) != triplet.end();
    const auto& lib = shape_library();
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(lib.size()); ++i) {
        if (i == grammar.shape_key || i == grammar.neighbor_shape) continue;
        if (has_rotation && rotation_is_translation(lib[i])) continue;
        if (has_reflection && reflection_axes_coincide(lib[i])) continue;
        out.push_back(i);
    }
    return out;
}

std::vector<Color> free_color_pool(const VisualGrammar& grammar) {
    std::vector<Color> out;
    for (int v = 1; v <= 9; ++v) {
        Color c = static_cast<Color>(v);
        if (c == grammar.color_key || c == grammar.neighbor_color) continue;
        bool recolor_target = false;
        for (const TransformSpec& spec : grammar.assignment)
            if (const auto* r = std::get_if<Recolor>(&spec))
                if (r->target == c) recolor_target = true;
        if (recolor_target) continue;
        out.push_back(c);
    }
    return out;
}

namespace {

// A composite counts as demonstrable on a shape when, alone on an empty
// grid, every part changes the grid. Anchor (3, 3) keeps every library
// shape in bounds under every parameter of every family.
bool all_parts_visible(const Composite& specs, const Shape& shape, Color color) {
    ObjectRef target = make_object(shape, {3, 3}, color);
    Grid grid = paint(Grid{}, target);
    std::vector<StepTrace> trace;
    try {
        apply_composite(grid, target, specs, &trace);
    } catch (const InvalidTransform&) {
        return false;
    }
    for (const StepTrace& step : trace)
        if (!step.changed) return false;
    return true;
}

Coord translation_vector(const Translate& t) {
    switch (t.dir) {
        case Direction::up: return {-t.step, 0};
        case Direction::down: return {t.step, 0};
        case Direction::left: return {0, -t.step};
        case Direction::right: return {0, t.step};
    }
    return {0, 0};
}

Coord direction_vector(Direction dir) {
    switch (dir) {
        case Direction::up: return {-1, 0};
        case Direction::down: return {1, 0};
        case Direction::left: return {0, -1};
        case Direction::right: return {0, 1};
    }
    return {0, 0};
}

Direction opposite_direction(Direction dir) {
    switch (dir) {
        case Direction::up: return Direction::down;
        case Direction::down: return Direction::up;
        case Direction::left: return Direction::right;
        case Direction::right: return Direction::left;
    }
    return dir;
}

bool translation_in_space(Coord v, Mode mode) {
    for (const TransformSpec& spec : family_param_space(TransformFamily::translation, mode))
        if (translation_vector(std::get<Translate>(spec)) == v) return true;
    return false;
}

bool extension_in_space(Direction dir, Mode mode) {
    for (const TransformSpec& spec : family_param_space(TransformFamily::extension, mode))
        if (std::get<Extend>(spec).dir == dir) return true;
    return false;
}

// Episodes that only ever show the full composite leave room for a second
// grammar telling the same story with different parts, as long as the nets
// agree. Each retelling displaces the result by a fixed offset:
//  - rotation retold as reflection (or the reverse) when the rotated and
//    mirrored key coincide, displaced by the rotation's anchor drift, since
//    rotating about the bounding-box corner lands where the mirrored object
//    would sit shifted left by its height (up by its width counter-clockwise);
//  - clockwise retold as counter-clockwise on a 180-degree-symmetric key, or
//    sense and axis flipped together when rotation and reflection are both
//    assigned, displaced by the difference of the two drifts;
//  - extension retold in the opposite direction, displaced one cell along the
//    original direction, since extending a shape one way equals extending its
//    shifted copy the other way.
// The assignment is unidentifiable whenever some combination of retellings is
// absorbed exactly by moving the assigned translation to another point of the
// mode's parameter space, or by leaving it untouched.
bool translation_masks_assignment(const VisualGrammar& grammar, const Shape& key_shape) {
    const Translate* translation = nullptr;
    const Rotate* rotation = nullptr;
    const Reflect* reflection = nullptr;
    const Extend* extension = nullptr;
    for (const TransformSpec& spec : grammar.assignment) {
        if (const auto* t = std::get_if<Translate>(&spec)) translation = t;
        if (const auto* r = std::get_if<Rotate>(&spec)) rotation = r;
        if (const auto* f = std::get_if<Reflect>(&spec)) reflection = f;
        if (const auto* e = std::get_if<Extend>(&spec)) extension = e;
    }
    int h = 0, w = 0;
    for (Coord c : key_shape) {
        h = std::max(h, c.row + 1);
        w = std::max(w, c.col + 1);
    }
    auto anchor_drift = [&](bool clockwise) {
        return clockwise ? Coord{0, -(h - 1)} : Coord{-(w - 1), 0};
    };

    std::vector<Coord> swaps;
    if (rotation && reflection) {
        bool cw = rotation->sense == RotationSense::cw;
        Coord mine = anchor_drift(cw);
        Coord other = anchor_drift(!cw);
        swaps.push_back({mine.row - other.row, mine.col - other.col});
    } else if (rotation) {
        bool cw = rotation->sense == RotationSense::cw;
        Shape rotated = rotated_shape(key_shape, cw);
        if (rotated == mirrored_shape(key_shape, true) ||
            rotated == mirrored_shape(key_shape, false))
            swaps.push_back(anchor_drift(cw));
        if (rotated == rotated_shape(key_shape, !cw)) {
            Coord mine = anchor_drift(cw);
            Coord other = anchor_drift(!cw);
            swaps.push_back({mine.row - other.row, mine.col - other.col});
        }
    } else if (reflection) {
        Shape mirrored = mirrored_shape(key_shape, reflection->axis == Axis::horizontal);
        for (bool cw : {true, false}) {
            if (rotated_shape(key_shape, cw) != mirrored) continue;
            Coord drift = anchor_drift(cw);
            swaps.push_back({-drift.row, -drift.col});
        }
    }

    std::vector<Coord> deltas = swaps;
    if (extension && extension_in_space(opposite_direction(extension->dir), grammar.mode)) {
        Coord step = direction_vector(extension->dir);
        deltas.push_back(step);
        for (Coord swap : swaps) deltas.push_back({swap.row + step.row, swap.col + step.col});
    }

    for (Coord delta : deltas) {
        if (translation) {
            Coord v = translation_vector(*translation);
            if (translation_in_space({v.row + delta.row, v.col + delta.col}, grammar.mode))
                return true;
        } else if (delta == Coord{0, 0}) {
            return true;
        }
    }
    return false;
}

}  // namespace

bool keys_feasible(const VisualGrammar& grammar) {
    const auto& lib = shape_library();
    if (grammar.neighbor_shape == grammar.shape_key) return false;
    if (grammar.neighbor_color == grammar.color_key) return false;
    auto triplet = grammar.triplet();
    bool has_rotation =
        std::find(triplet.begin(), triplet.end(), TransformFamily::rotation) != triplet.end();
    if (has_rotation && rotation_is_translation(lib[grammar.shape_key])) return false;
    bool has_reflection =
        std::find(triplet.begin(), triplet.end(), TransformFamily::reflection) != triplet.end();
    if (has_reflection && reflection_axes_coincide(lib[grammar.shape_key])) return false;
    if (translation_masks_assignment(grammar, lib[grammar.shape_key])) return false;
    std::vector<int> shapes = free_shape_pool(grammar);
    std::vector<Color> colors = free_color_pool(grammar);
    if (shapes.size() < 2 || colors.empty()) return false;
    for (int t = 0; t < kTiers; ++t) {
        Tier tier = static_cast<Tier>(t);
        Composite specs = tier_composite(grammar, tier);
        Color color = tier_has(tier, IndicatorKind::color) ? grammar.color_key : colors.front();
        if (tier_has(tier, IndicatorKind::shape)) {
            if (!all_parts_visible(specs, lib[grammar.shape_key], color)) return false;
        } else {
            int viable = 0;
            for (int idx : shapes)
                if (all_parts_visible(specs, lib[idx], color)) ++viable;
            if (viable < 2) return false;
        }
    }
    return true;
}

VisualGrammar sample_grammar(Rng& rng, Mode mode) {
    VisualGrammar grammar;
    grammar.mode = mode;
    const auto& triplets = family_triplets();
    auto triplet = triplets[rng.uniform_int(0, static_cast<int64_t>(triplets.size()) - 1)];
    // Some parameter combinations admit no identifiable keys at all (for
    // example a long leftward move combined with rotation and reflection),
    // so parameters are rejection-sampled alongside keys. The triplet stays
    // fixed, keeping the distribution over triplets uniform.
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<int> order = {0, 1, 2};
        rng.shuffle(order);
        for (int k = 0; k < kIndicatorKinds; ++k) {
            auto space = family_param_space(triplet[order[k]], mode);
            grammar.assignment[k] = rng.pick(space);
        }
        try {
            rekey_grammar(rng, grammar);
            return grammar;
        } catch (const GenerationExhausted&) {
        }
    }
    throw GenerationExhausted("no identifiable parameters for triplet " + triplet_label(triplet));
}

void rekey_grammar(Rng& rng, VisualGrammar& grammar) {
    const int n_shapes = static_cast<int>(shape_library().size());
    // Recoloring the key object to its own color can never register as a
    // change, so such color keys are excluded outright.
    std::vector<Color> color_choices;
    for (int v = 1; v <= 9; ++v) {
        Color c = static_cast<Color>(v);
        bool recolor_target = false;
        for (const TransformSpec& spec : grammar.assignment)
            if (const auto* r = std::get_if<Recolor>(&spec))
                if (r->target == c) recolor_target = true;
        if (!recolor_target) color_choices.push_back(c);
    }
    // Sweeping every shape key in shuffled order keeps the draw uniform over
    // feasible keys while bounding the work when few or none are feasible.
    std::vector<int> keys(n_shapes);
    std::iota(keys.begin(), keys.end(), 0);
    for (int round = 0; round < 4; ++round) {
        rng.shuffle(keys);
        for (int key : keys) {
            grammar.shape_key = key;
            grammar.color_key = rng.pick(color_choices);
            do {
                grammar.neighbor_shape = static_cast<int>(rng.uniform_int(0, n_shapes - 1));
            } while (grammar.neighbor_shape == grammar.shape_key);
            do {
                grammar.neighbor_color = static_cast<Color>(rng.uniform_int(1, 9));
            } while (grammar.neighbor_color == grammar.color_key);
            if (keys_feasible(grammar)) return;
        }
    }
    throw GenerationExhausted("no feasible keys for triplet " + triplet_label(grammar.triplet()));
}

}  // namespace carc
