#pragma once

#include <carc/grid.hpp>
#include <carc/rng.hpp>

#include <vector>

namespace carc::testutil {

// Grid filled with independent uniform values; density is the probability a
// cell is nonzero.
inline Grid random_noise_grid(Rng& rng, double density = 0.3) {
    Grid g;
    for (int r = 0; r < Grid::kSide; ++r)
        for (int c = 0; c < Grid::kSide; ++c)
            if (rng.bernoulli(density))
                g.set(r, c, static_cast<uint8_t>(rng.uniform_int(1, 9)));
    return g;
}

// Grid with a handful of randomly placed small objects (possibly touching).
inline Grid random_object_grid(Rng& rng, int max_objects = 4) {
    static const std::vector<Shape> shapes = {
        {{0, 0}, {0, 1}, {0, 2}},
        {{0, 0}, {1, 0}, {2, 0}},
        {{0, 0}, {1, 1}, {2, 2}},
        {{0, 0}, {0, 1}, {1, 0}, {1, 1}},
        {{0, 0}, {1, 0}, {2, 0}, {2, 1}},
        {{0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}},
    };
    Grid g;
    int n = static_cast<int>(rng.uniform_int(1, max_objects));
    for (int k = 0; k < n; ++k) {
        const Shape& s = rng.pick(shapes);
        for (int attempt = 0; attempt < 50; ++attempt) {
            Coord origin{static_cast<int>(rng.uniform_int(0, 9)),
                         static_cast<int>(rng.uniform_int(0, 9))};
            ObjectRef obj = make_object(s, origin, static_cast<Color>(rng.uniform_int(1, 9)));
            bool ok = true;
            for (Coord c : obj.cells)
                if (!Grid::in_bounds(c) || g.at(c.row, c.col) != 0) { ok = false; break; }
            if (!ok) continue;
            g = paint(g, obj);
            break;
        }
    }
    return g;
}

}  // namespace carc::testutil
