#include <carc/shapes.hpp>

#include <algorithm>

namespace carc {

const std::vector<Shape>& shape_library() {
    static const std::vector<Shape> library = {
        {{0, 0}, {0, 1}, {0, 2}},                          // bar3 horizontal
        {{0, 0}, {1, 0}, {2, 0}},                          // bar3 vertical
        {{0, 0}, {1, 0}, {1, 1}},                          // corner
        {{0, 0}, {1, 1}, {2, 2}},                          // diagonal3
        {{0, 0}, {0, 1}, {0, 2}, {0, 3}},                  // bar4 horizontal
        {{0, 0}, {1, 0}, {2, 0}, {3, 0}},                  // bar4 vertical
        {{0, 0}, {0, 1}, {1, 0}, {1, 1}},                  // square
        {{0, 0}, {1, 0}, {2, 0}, {2, 1}},                  // L
        {{0, 1}, {1, 1}, {2, 0}, {2, 1}},                  // J
        {{0, 0}, {0, 1}, {0, 2}, {1, 1}},                  // T
        {{0, 1}, {0, 2}, {1, 0}, {1, 1}},                  // S
        {{0, 0}, {0, 1}, {1, 1}, {1, 2}},                  // Z
        {{0, 0}, {1, 1}, {2, 2}, {3, 3}},                  // diagonal4
        {{0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}},          // plus
        {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {2, 1}},          // tall T
        {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}},  // 2x3 block
    };
    return library;
}

int shape_library_index(const Shape& shape) {
    const auto& lib = shape_library();
    for (size_t i = 0; i < lib.size(); ++i)
        if (lib[i] == shape) return static_cast<int>(i);
    return -1;
}

std::string shape_signature(const Shape& shape) {
    std::string out;
    for (Coord c : shape) {
        if (!out.empty()) out += "-";
        out += std::to_string(c.row) + "." + std::to_string(c.col);
    }
    return out;
}

Shape rotated_shape(const Shape& shape, bool clockwise) {
    std::vector<Coord> cells;
    cells.reserve(shape.size());
    for (Coord c : shape) {
        if (clockwise)
            cells.push_back({c.col, -c.row});
        else
            cells.push_back({-c.col, c.row});
    }
    return normalize(cells);
}

bool rotation_is_translation(const Shape& shape) {
    return rotated_shape(shape, true) == shape;
}

Shape mirrored_shape(const Shape& shape, bool horizontal_axis) {
    int max_row = 0, max_col = 0;
    for (Coord c : shape) {
        max_row = std::max(max_row, c.row);
        max_col = std::max(max_col, c.col);
    }
    std::vector<Coord> mirrored;
    mirrored.reserve(shape.size());
    for (Coord c : shape) {
        if (horizontal_axis)
            mirrored.push_back({max_row - c.row, c.col});
        else
            mirrored.push_back({c.row, max_col - c.col});
    }
    std::sort(mirrored.begin(), mirrored.end());
    return mirrored;
}

bool symmetric_under(const Shape& shape, bool horizontal_axis) {
    return mirrored_shape(shape, horizontal_axis) == shape;
}

bool reflection_axes_coincide(const Shape& shape) {
    Shape h = mirrored_shape(shape, true);
    return h != shape && h == mirrored_shape(shape, false);
}

bool rotation_is_reflection(const Shape& shape) {
    for (bool clockwise : {true, false}) {
        Shape rotated = rotated_shape(shape, clockwise);
        if (rotated == mirrored_shape(shape, true) || rotated == mirrored_shape(shape, false))
            return true;
    }
    return false;
}

}  // namespace carc
