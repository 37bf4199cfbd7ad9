#pragma once

#include "bowlerhat3d/morphology.hpp"
#include "bowlerhat3d/volume.hpp"

#include <vector>

namespace bh3d {

// d_max is the expected maximum diameter of the tubular structures to keep.
// Scales step through the odd diameters 1, 3, 5, ..., d_max.
struct BowlerHatParams {
    int d_max = 15;
    int n_directions = 32;
};

struct ScaleBank {
    std::vector<int> diameters;
    std::vector<Volume> volumes;
    BowlerHatParams params;
};

std::vector<int> scale_list(const BowlerHatParams& p);

// Per-scale openings by voxelized balls.
ScaleBank sphere_bank(const Volume& v, const BowlerHatParams& p, int threads = 1);

// Per-scale pointwise maximum over line openings across the direction set.
ScaleBank line_bank(const Volume& v, const BowlerHatParams& p, int threads = 1);

// max over scales of (line opening - sphere opening), clamped at zero.
Volume bowler_hat(const Volume& v, const BowlerHatParams& p, int threads = 1);

// Same reduction from pre-built banks; the banks must agree on scales and dims.
Volume bowler_hat_from_banks(const ScaleBank& spheres, const ScaleBank& lines);

} // namespace bh3d
