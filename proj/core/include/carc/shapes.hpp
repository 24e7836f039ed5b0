#pragma once

#include <carc/grid.hpp>

#include <string>
#include <vector>

namespace carc {

// The fixed library of 16 polyomino shapes (3-6 cells) objects are built
// from: bars, corners, L/J/T/S/Z pieces, a 2x2 square, a plus sign, diagonals
// and a 2x3 block. Shape identity is the exact normalized cell set.
const std::vector<Shape>& shape_library();

// Index into shape_library(), or -1 when the shape is not in the library.
int shape_library_index(const Shape& shape);

// Compact stable form "r.c-r.c-..." used inside grammar signatures.
std::string shape_signature(const Shape& shape);

// The normalized shape after rotating the cell set 90 degrees. Rotating a
// shape that yields itself again (2x2 square, plus sign) is exactly a grid
// translation, which several consumers must treat specially.
Shape rotated_shape(const Shape& shape, bool clockwise);
bool rotation_is_translation(const Shape& shape);

// The cell set mirrored within its bounding box (still normalized).
Shape mirrored_shape(const Shape& shape, bool horizontal_axis);

// True when mirroring leaves the normalized cell set unchanged.
bool symmetric_under(const Shape& shape, bool horizontal_axis);

// True when the two mirror images are the same cell set yet differ from the
// shape itself (180-degree rotationally symmetric, not axis-symmetric:
// diagonals, S, Z). Reflecting such an object visibly changes it without
// revealing which axis was used.
bool reflection_axes_coincide(const Shape& shape);

// True when some rotated image equals some mirror image as a normalized cell
// set (squares, plus, diagonals). On such an object a rotation is a
// reflection followed by a position shift, so rotating and reflecting are
// indistinguishable whenever a translation is also in play.
bool rotation_is_reflection(const Shape& shape);

}  // namespace carc
