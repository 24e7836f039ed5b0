#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace carc {

// Cell values. 0 is background; 1..9 are object colors.
enum class Color : uint8_t {
    background = 0,
    red = 1,
    orange = 2,
    yellow = 3,
    green = 4,
    blue = 5,
    purple = 6,
    pink = 7,
    cyan = 8,
    gray = 9,
};

const char* color_name(Color c);
Color color_from_name(const std::string& name);

struct Coord {
    int row = 0;
    int col = 0;
    auto operator<=>(const Coord&) const = default;
};

// A set of cells in normalized position: offsets relative to the cell-wise
// (min row, min col) of the set, sorted. Two objects have the same shape iff
// their normalized sets are equal; no rotation or reflection equivalence.
using Shape = std::vector<Coord>;

Shape normalize(const std::vector<Coord>& cells);

// Fixed-size 10x10 grid of cell values 0..9.
class Grid {
public:
    static constexpr int kSide = 10;
    static constexpr int kCells = kSide * kSide;

    Grid() { cells_.fill(0); }

    // rows.size() and every row size must be kSide; values must be 0..9.
    static Grid from_rows(const std::vector<std::vector<int>>& rows);

    uint8_t at(int row, int col) const { return cells_[index(row, col)]; }
    void set(int row, int col, uint8_t value);

    static bool in_bounds(int row, int col) {
        return row >= 0 && row < kSide && col >= 0 && col < kSide;
    }
    static bool in_bounds(Coord c) { return in_bounds(c.row, c.col); }

    std::vector<std::vector<int>> to_rows() const;

    bool operator==(const Grid& other) const = default;

private:
    static int index(int row, int col);
    std::array<uint8_t, kCells> cells_;
};

// A connected same-color component of a grid. Cells are sorted.
struct ObjectRef {
    std::vector<Coord> cells;
    Color color = Color::background;

    Shape shape() const { return normalize(cells); }
    Coord bbox_min() const;
    Coord bbox_max() const;
    bool operator==(const ObjectRef&) const = default;
};

// Instantiates a shape at an absolute position.
ObjectRef make_object(const Shape& shape, Coord origin, Color color);

// Maximal same-color components under Moore (8-neighbor) connectivity,
// ordered by (min row, min col, color) with the sorted cell list as a final
// tie-break so the order is deterministic.
std::vector<ObjectRef> extract_objects(const Grid& grid);

// Writes the object's cells into the grid. Throws OverlapError if any target
// cell is occupied, or std::out_of_range if any cell is out of bounds.
Grid paint(const Grid& grid, const ObjectRef& object);

// Clears the object's cells. Throws MismatchError if any cell of the grid
// does not hold the object's color.
Grid erase(const Grid& grid, const ObjectRef& object);

// Textual nested-array form used in prompts and on the CLI:
// rows on separate lines, ", " separators, continuation rows indented by one
// space, e.g. "[[0, 1, ...],\n [0, 0, ...]]".
std::string format_grid(const Grid& grid);

// Accepts any whitespace layout of a 10x10 nested int array.
// Throws MismatchError if the text is not a valid 10x10 grid of 0..9.
Grid parse_grid(const std::string& text);

}  // namespace carc
