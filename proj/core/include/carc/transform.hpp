#pragma once

#include <carc/grid.hpp>

#include <compare>
#include <string>
#include <variant>
#include <vector>

namespace carc {

enum class TransformFamily { translation, rotation, reflection, extension, color_change };
enum class Direction { up, down, left, right };
enum class RotationSense { cw, ccw };
enum class Axis { horizontal, vertical };

// Parameter spaces. Restricted is the core setting: translations one step
// down or right, extensions up or left, recoloring to red or orange.
// Extended allows translations of 1-2 steps in any direction, extensions in
// any direction, and recoloring to red, orange, yellow or green.
enum class Mode { restricted, extended };

struct Translate {
    Direction dir = Direction::down;
    int step = 1;
    auto operator<=>(const Translate&) const = default;
};
struct Rotate {
    RotationSense sense = RotationSense::cw;
    auto operator<=>(const Rotate&) const = default;
};
struct Reflect {
    Axis axis = Axis::horizontal;
    auto operator<=>(const Reflect&) const = default;
};
struct Extend {
    Direction dir = Direction::up;
    auto operator<=>(const Extend&) const = default;
};
struct Recolor {
    Color target = Color::red;
    auto operator<=>(const Recolor&) const = default;
};

using TransformSpec = std::variant<Translate, Rotate, Reflect, Extend, Recolor>;

TransformFamily family_of(const TransformSpec& spec);
std::string family_name(TransformFamily family);
TransformFamily family_from_name(const std::string& name);

// "down", "down_2", "cw", "horizontal", "red", ...
std::string spec_param(const TransformSpec& spec);
TransformSpec make_spec(const std::string& family, const std::string& param);
std::string spec_signature(const TransformSpec& spec);  // "translation:down"

std::vector<TransformSpec> family_param_space(TransformFamily family, Mode mode);
std::vector<TransformSpec> all_specs(Mode mode);

// All single transformations share the same validity rule: every target cell
// must be in bounds and not occupied by a cell of another object in the
// source grid (the moving object's own cells are free to be reused).
bool check_valid(const Grid& grid, const ObjectRef& object, const TransformSpec& spec);

// Apply one transformation to one object; the rest of the grid is untouched.
// Throws InvalidTransform when check_valid is false.
Grid apply_translation(const Grid& grid, const ObjectRef& object, Direction dir, int step = 1);
// Rotates +-90 degrees about the object's bounding-box minimum corner:
// offsets (dr, dc) from that corner map to (dc, -dr) clockwise and
// (-dc, dr) counterclockwise.
Grid apply_rotation(const Grid& grid, const ObjectRef& object, RotationSense sense);
// Mirrors rows (horizontal axis) or columns (vertical axis) within the
// object's bounding box.
Grid apply_reflection(const Grid& grid, const ObjectRef& object, Axis axis);
// Grows the object by the empty in-bounds cells one step in the given
// direction from each object cell. Blocked or out-of-bounds cells are simply
// not added; a fully blocked extension is a valid no-op.
Grid apply_extension(const Grid& grid, const ObjectRef& object, Direction dir);
Grid apply_color_change(const Grid& grid, const ObjectRef& object, Color target);

Grid apply_spec(const Grid& grid, const ObjectRef& object, const TransformSpec& spec);

// A composite is a set of 1..3 transformations with pairwise distinct
// families. Application order is always canonical (rotation, reflection,
// extension, translation, color change) no matter how the parts are listed,
// and the target object is re-extracted from the grid between steps. Any
// invalid step invalidates the whole composite.
using Composite = std::vector<TransformSpec>;

int canonical_rank(TransformFamily family);
Composite canonical_order(Composite specs);
std::string composite_signature(const Composite& specs);

struct StepTrace {
    TransformSpec spec;
    bool changed = false;
};

Grid apply_composite(const Grid& grid, const ObjectRef& object, const Composite& specs,
                     std::vector<StepTrace>* trace = nullptr, ObjectRef* final_object = nullptr);

bool composite_valid(const Grid& grid, const ObjectRef& object, const Composite& specs);

}  // namespace carc
