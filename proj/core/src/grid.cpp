#include <carc/grid.hpp>

#include <carc/errors.hpp>

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <tuple>

namespace carc {

const char* color_name(Color c) {
    switch (c) {
        case Color::background: return "background";
        case Color::red: return "red";
        case Color::orange: return "orange";
        case Color::yellow: return "yellow";
        case Color::green: return "green";
        case Color::blue: return "blue";
        case Color::purple: return "purple";
        case Color::pink: return "pink";
        case Color::cyan: return "cyan";
        case Color::gray: return "gray";
    }
    return "?";
}

Color color_from_name(const std::string& name) {
    for (int v = 0; v <= 9; ++v) {
        Color c = static_cast<Color>(v);
        if (name == color_name(c)) return c;
    }
    throw MismatchError("unknown color name: " + name);
}

Shape normalize(const std::vector<Coord>& cells) {
    if (cells.empty()) return {};
    int min_row = cells[0].row;
    int min_col = cells[0].col;
    for (Coord c : cells) {
        min_row = std::min(min_row, c.row);
        min_col = std::min(min_col, c.col);
    }
    Shape out;
    out.reserve(cells.size());
    for (Coord c : cells) out.push_back({c.row - min_row, c.col - min_col});
    std::sort(out.begin(), out.end());
    return out;
}

int Grid::index(int row, int col) {
    if (!in_bounds(row, col)) throw std::out_of_range("grid cell out of bounds");
    return row * kSide + col;
}

Grid Grid::from_rows(const std::vector<std::vector<int>>& rows) {
    if (rows.size() != kSide) throw MismatchError("grid must have 10 rows");
    Grid g;
    for (int r = 0; r < kSide; ++r) {
        if (rows[r].size() != kSide) throw MismatchError("grid rows must have 10 columns");
        for (int c = 0; c < kSide; ++c) {
            int v = rows[r][c];
            if (v < 0 || v > 9) throw MismatchError("grid values must be 0..9");
            g.cells_[r * kSide + c] = static_cast<uint8_t>(v);
        }
    }
    return g;
}

void Grid::set(int row, int col, uint8_t value) {
    if (value > 9) throw MismatchError("grid values must be 0..9");
    cells_[index(row, col)] = value;
}

std::vector<std::vector<int>> Grid::to_rows() const {
    std::vector<std::vector<int>> rows(kSide, std::vector<int>(kSide));
    for (int r = 0; r < kSide; ++r)
        for (int c = 0; c < kSide; ++c) rows[r][c] = cells_[r * kSide + c];
    return rows;
}

Coord ObjectRef::bbox_min() const {
    Coord m = cells.at(0);
    for (Coord c : cells) {
        m.row = std::min(m.row, c.row);
        m.col = std::min(m.col, c.col);
    }
    return m;
}

Coord ObjectRef::bbox_max() const {
    Coord m = cells.at(0);
    for (Coord c : cells) {
        m.row = std::max(m.row, c.row);
        m.col = std::max(m.col, c.col);
    }
    return m;
}

ObjectRef make_object(const Shape& shape, Coord origin, Color color) {
    ObjectRef obj;
    obj.color = color;
    obj.cells.reserve(shape.size());
    for (Coord c : shape) obj.cells.push_back({c.row + origin.row, c.col + origin.col});
    std::sort(obj.cells.begin(), obj.cells.end());
    return obj;
}

std::vector<ObjectRef> extract_objects(const Grid& grid) {
    std::array<bool, Grid::kCells> visited{};
    std::vector<ObjectRef> objects;
    for (int r = 0; r < Grid::kSide; ++r) {
        for (int c = 0; c < Grid::kSide; ++c) {
            uint8_t color = grid.at(r, c);
            if (color == 0 || visited[r * Grid::kSide + c]) continue;
            ObjectRef obj;
            obj.color = static_cast<Color>(color);
            std::vector<Coord> stack{{r, c}};
            visited[r * Grid::kSide + c] = true;
            while (!stack.empty()) {
                Coord cur = stack.back();
                stack.pop_back();
                obj.cells.push_back(cur);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        int nr = cur.row + dr, nc = cur.col + dc;
                        if (!Grid::in_bounds(nr, nc)) continue;
                        if (visited[nr * Grid::kSide + nc]) continue;
                        if (grid.at(nr, nc) != color) continue;
                        visited[nr * Grid::kSide + nc] = true;
                        stack.push_back({nr, nc});
                    }
                }
            }
            std::sort(obj.cells.begin(), obj.cells.end());
            objects.push_back(std::move(obj));
        }
    }
    std::sort(objects.begin(), objects.end(), [](const ObjectRef& a, const ObjectRef& b) {
        return std::tuple(a.bbox_min().row, a.bbox_min().col, static_cast<int>(a.color), a.cells) <
               std::tuple(b.bbox_min().row, b.bbox_min().col, static_cast<int>(b.color), b.cells);
    });
    return objects;
}

Grid paint(const Grid& grid, const ObjectRef& object) {
    Grid out = grid;
    for (Coord c : object.cells) {
        if (out.at(c.row, c.col) != 0) throw OverlapError("paint target cell is occupied");
        out.set(c.row, c.col, static_cast<uint8_t>(object.color));
    }
    return out;
}

Grid erase(const Grid& grid, const ObjectRef& object) {
    Grid out = grid;
    for (Coord c : object.cells) {
        if (out.at(c.row, c.col) != static_cast<uint8_t>(object.color))
            throw MismatchError("erase cell does not hold the object color");
        out.set(c.row, c.col, 0);
    }
    return out;
}

std::string format_grid(const Grid& grid) {
    std::string out = "[";
    for (int r = 0; r < Grid::kSide; ++r) {
        out += r == 0 ? "[" : " [";
        for (int c = 0; c < Grid::kSide; ++c) {
            out += static_cast<char>('0' + grid.at(r, c));
            if (c != Grid::kSide - 1) out += ", ";
        }
        out += r == Grid::kSide - 1 ? "]" : "],\n";
    }
    out += "]";
    return out;
}

Grid parse_grid(const std::string& text) {
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto expect = [&](char ch) {
        skip_ws();
        if (pos >= text.size() || text[pos] != ch)
            throw MismatchError(std::string("expected '") + ch + "' in grid text");
        ++pos;
    };
    expect('[');
    std::vector<std::vector<int>> rows;
    for (int r = 0; r < Grid::kSide; ++r) {
        expect('[');
        std::vector<int> row;
        for (int c = 0; c < Grid::kSide; ++c) {
            skip_ws();
            size_t start = pos;
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == start) throw MismatchError("expected integer in grid text");
            int value;
            try {
                value = std::stoi(text.substr(start, pos - start));
            } catch (const std::exception&) {
                throw MismatchError("unreadable integer in grid text");
            }
            if (value < 0 || value > 9) throw MismatchError("grid values must be 0..9");
            row.push_back(value);
            if (c != Grid::kSide - 1) expect(',');
        }
        expect(']');
        rows.push_back(std::move(row));
        if (r != Grid::kSide - 1) expect(',');
    }
    expect(']');
    return Grid::from_rows(rows);
}

}  // namespace carc
