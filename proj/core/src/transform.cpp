#include <carc/transform.hpp>

#include <carc/errors.hpp>

#include <algorithm>
#include <optional>

namespace carc {

namespace {

Coord delta(Direction dir) {
    switch (dir) {
        case Direction::up: return {-1, 0};
        case Direction::down: return {1, 0};
        case Direction::left: return {0, -1};
        case Direction::right: return {0, 1};
    }
    return {0, 0};
}

const char* direction_name(Direction dir) {
    switch (dir) {
        case Direction::up: return "up";
        case Direction::down: return "down";
        case Direction::left: return "left";
        case Direction::right: return "right";
    }
    return "?";
}

Direction direction_from_name(const std::string& name) {
    if (name == "up") return Direction::up;
    if (name == "down") return Direction::down;
    if (name == "left") return Direction::left;
    if (name == "right") return Direction::right;
    throw MismatchError("unknown direction: " + name);
}

bool cell_free_for(const Grid& grid, const ObjectRef& object, Coord c) {
    if (grid.at(c.row, c.col) == 0) return true;
    return std::binary_search(object.cells.begin(), object.cells.end(), c);
}

// Cells of the object after the spec, or nullopt when the move is invalid.
// The surrounding grid provides the collision context.
std::optional<std::vector<Coord>> mapped_cells(const Grid& grid, const ObjectRef& object,
                                               const TransformSpec& spec) {
    std::vector<Coord> out;
    if (const auto* t = std::get_if<Translate>(&spec)) {
        Coord d = delta(t->dir);
        for (Coord c : object.cells)
            out.push_back({c.row + d.row * t->step, c.col + d.col * t->step});
    } else if (const auto* r = std::get_if<Rotate>(&spec)) {
        Coord pivot = object.bbox_min();
        for (Coord c : object.cells) {
            int dr = c.row - pivot.row, dc = c.col - pivot.col;
            if (r->sense == RotationSense::cw)
                out.push_back({pivot.row + dc, pivot.col - dr});
            else
                out.push_back({pivot.row - dc, pivot.col + dr});
        }
    } else if (const auto* f = std::get_if<Reflect>(&spec)) {
        Coord lo = object.bbox_min();
        Coord hi = object.bbox_max();
        for (Coord c : object.cells) {
            if (f->axis == Axis::horizontal)
                out.push_back({hi.row - (c.row - lo.row), c.col});
            else
                out.push_back({c.row, hi.col - (c.col - lo.col)});
        }
    } else if (const auto* e = std::get_if<Extend>(&spec)) {
        Coord d = delta(e->dir);
        out = object.cells;
        for (Coord c : object.cells) {
            Coord n{c.row + d.row, c.col + d.col};
            if (!Grid::in_bounds(n)) continue;
            if (grid.at(n.row, n.col) != 0) continue;
            out.push_back(n);
        }
    } else {
        out = object.cells;  // recolor keeps the cells
    }
    for (Coord c : out)
        if (!Grid::in_bounds(c) || !cell_free_for(grid, object, c)) return std::nullopt;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Color result_color(const ObjectRef& object, const TransformSpec& spec) {
    if (const auto* c = std::get_if<Recolor>(&spec)) return c->target;
    return object.color;
}

Grid apply_checked(const Grid& grid, const ObjectRef& object, const TransformSpec& spec) {
    auto cells = mapped_cells(grid, object, spec);
    if (!cells)
        throw InvalidTransform("invalid " + family_name(family_of(spec)) + " of " +
                               std::string(color_name(object.color)) + " object");
    ObjectRef moved;
    moved.cells = std::move(*cells);
    moved.color = result_color(object, spec);
    return paint(erase(grid, object), moved);
}

}  // namespace

TransformFamily family_of(const TransformSpec& spec) {
    switch (spec.index()) {
        case 0: return TransformFamily::translation;
        case 1: return TransformFamily::rotation;
        case 2: return TransformFamily::reflection;
        case 3: return TransformFamily::extension;
        default: return TransformFamily::color_change;
    }
}

std::string family_name(TransformFamily family) {
    switch (family) {
        case TransformFamily::translation: return "translation";
        case TransformFamily::rotation: return "rotation";
        case TransformFamily::reflection: return "reflection";
        case TransformFamily::extension: return "extension";
        case TransformFamily::color_change: return "color_change";
    }
    return "?";
}

TransformFamily family_from_name(const std::string& name) {
    if (name == "translation") return TransformFamily::translation;
    if (name == "rotation") return TransformFamily::rotation;
    if (name == "reflection") return TransformFamily::reflection;
    if (name == "extension") return TransformFamily::extension;
    if (name == "color_change") return TransformFamily::color_change;
    throw MismatchError("unknown transform family: " + name);
}

std::string spec_param(const TransformSpec& spec) {
    if (const auto* t = std::get_if<Translate>(&spec)) {
        std::string out = direction_name(t->dir);
        if (t->step != 1) out += "_" + std::to_string(t->step);
        return out;
    }
    if (const auto* r = std::get_if<Rotate>(&spec))
        return r->sense == RotationSense::cw ? "cw" : "ccw";
    if (const auto* f = std::get_if<Reflect>(&spec))
        return f->axis == Axis::horizontal ? "horizontal" : "vertical";
    if (const auto* e = std::get_if<Extend>(&spec)) return direction_name(e->dir);
    return color_name(std::get<Recolor>(spec).target);
}

TransformSpec make_spec(const std::string& family, const std::string& param) {
    switch (family_from_name(family)) {
        case TransformFamily::translation: {
            std::string dir = param;
            int step = 1;
            if (auto at = param.find('_'); at != std::string::npos) {
                dir = param.substr(0, at);
                try {
                    step = std::stoi(param.substr(at + 1));
                } catch (const std::exception&) {
                    throw MismatchError("bad translation step: " + param);
                }
                if (step < 1 || step > 9) throw MismatchError("bad translation step: " + param);
            }
            return Translate{direction_from_name(dir), step};
        }
        case TransformFamily::rotation:
            if (param == "cw") return Rotate{RotationSense::cw};
            if (param == "ccw") return Rotate{RotationSense::ccw};
            throw MismatchError("unknown rotation sense: " + param);
        case TransformFamily::reflection:
            if (param == "horizontal") return Reflect{Axis::horizontal};
            if (param == "vertical") return Reflect{Axis::vertical};
            throw MismatchError("unknown reflection axis: " + param);
        case TransformFamily::extension:
            return Extend{direction_from_name(param)};
        case TransformFamily::color_change: {
            Color c = color_from_name(param);
            if (c == Color::background) throw MismatchError("cannot recolor to background");
            return Recolor{c};
        }
    }
    throw MismatchError("unknown transform family: " + family);
}

std::string spec_signature(const TransformSpec& spec) {
    return family_name(family_of(spec)) + ":" + spec_param(spec);
}

std::vector<TransformSpec> family_param_space(TransformFamily family, Mode mode) {
    std::vector<TransformSpec> out;
    switch (family) {
        case TransformFamily::translation:
            if (mode == Mode::restricted) {
                out = {Translate{Direction::down, 1}, Translate{Direction::right, 1}};
            } else {
                for (Direction d : {Direction::up, Direction::down, Direction::left, Direction::right})
                    for (int step : {1, 2}) out.push_back(Translate{d, step});
            }
            break;
        case TransformFamily::rotation:
            out = {Rotate{RotationSense::cw}, Rotate{RotationSense::ccw}};
            break;
        case TransformFamily::reflection:
            out = {Reflect{Axis::horizontal}, Reflect{Axis::vertical}};
            break;
        case TransformFamily::extension:
            if (mode == Mode::restricted)
                out = {Extend{Direction::up}, Extend{Direction::left}};
            else
                out = {Extend{Direction::up}, Extend{Direction::down}, Extend{Direction::left},
                       Extend{Direction::right}};
            break;
        case TransformFamily::color_change:
            if (mode == Mode::restricted)
                out = {Recolor{Color::red}, Recolor{Color::orange}};
            else
                out = {Recolor{Color::red}, Recolor{Color::orange}, Recolor{Color::yellow},
                       Recolor{Color::green}};
            break;
    }
    return out;
}

std::vector<TransformSpec> all_specs(Mode mode) {
    std::vector<TransformSpec> out;
    for (TransformFamily f :
         {TransformFamily::translation, TransformFamily::rotation, TransformFamily::reflection,
          TransformFamily::extension, TransformFamily::color_change}) {
        auto space = family_param_space(f, mode);
        out.insert(out.end(), space.begin(), space.end());
    }
    return out;
}

bool check_valid(const Grid& grid, const ObjectRef& object, const TransformSpec& spec) {
    return mapped_cells(grid, object, spec).has_value();
}

Grid apply_translation(const Grid& grid, const ObjectRef& object, Direction dir, int step) {
    return apply_checked(grid, object, Translate{dir, step});
}

Grid apply_rotation(const Grid& grid, const ObjectRef& object, RotationSense sense) {
    return apply_checked(grid, object, Rotate{sense});
}

Grid apply_reflection(const Grid& grid, const ObjectRef& object, Axis axis) {
    return apply_checked(grid, object, Reflect{axis});
}

Grid apply_extension(const Grid& grid, const ObjectRef& object, Direction dir) {
    return apply_checked(grid, object, Extend{dir});
}

Grid apply_color_change(const Grid& grid, const ObjectRef& object, Color target) {
    if (target == Color::background) throw InvalidTransform("cannot recolor to background");
    return apply_checked(grid, object, Recolor{target});
}

Grid apply_spec(const Grid& grid, const ObjectRef& object, const TransformSpec& spec) {
    return apply_checked(grid, object, spec);
}

int canonical_rank(TransformFamily family) {
    switch (family) {
        case TransformFamily::rotation: return 0;
        case TransformFamily::reflection: return 1;
        case TransformFamily::extension: return 2;
        case TransformFamily::translation: return 3;
        case TransformFamily::color_change: return 4;
    }
    return 5;
}

Composite canonical_order(Composite specs) {
    std::stable_sort(specs.begin(), specs.end(), [](const TransformSpec& a, const TransformSpec& b) {
        return canonical_rank(family_of(a)) < canonical_rank(family_of(b));
    });
    return specs;
}

std::string composite_signature(const Composite& specs) {
    std::string out;
    for (const auto& spec : canonical_order(specs)) {
        if (!out.empty()) out += "+";
        out += spec_signature(spec);
    }
    return out;
}

Grid apply_composite(const Grid& grid, const ObjectRef& object, const Composite& specs,
                     std::vector<StepTrace>* trace, ObjectRef* final_object) {
    if (specs.empty() || specs.size() > 3)
        throw MismatchError("composite must have 1..3 parts");
    for (size_t i = 0; i < specs.size(); ++i)
        for (size_t j = i + 1; j < specs.size(); ++j)
            if (family_of(specs[i]) == family_of(specs[j]))
                throw MismatchError("composite families must be distinct");
    if (trace) trace->clear();

    Grid state = grid;
    ObjectRef current = object;
    for (const auto& spec : canonical_order(specs)) {
        Grid next = apply_checked(state, current, spec);
        if (trace) trace->push_back({spec, next != state});
        // Re-extract the object for the following step: the component of the
        // new grid holding the transformed cells.
        auto cells = mapped_cells(state, current, spec);
        Coord seed = cells->at(0);
        ObjectRef found;
        bool ok = false;
        for (const auto& candidate : extract_objects(next)) {
            if (std::binary_search(candidate.cells.begin(), candidate.cells.end(), seed)) {
                found = candidate;
                ok = true;
                break;
            }
        }
        if (!ok) throw InvalidTransform("composite lost track of the target object");
        state = next;
        current = found;
    }
    if (final_object) *final_object = current;
    return state;
}

bool composite_valid(const Grid& grid, const ObjectRef& object, const Composite& specs) {
    try {
        apply_composite(grid, object, specs);
        return true;
    } catch (const InvalidTransform&) {
        return false;
    }
}

}  // namespace carc
