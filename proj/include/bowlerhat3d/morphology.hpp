#ifndef BH3D_MORPHOLOGY_HPP
#define BH3D_MORPHOLOGY_HPP

#include "bowlerhat3d/volume.hpp"

#include <array>
#include <vector>

namespace bh3d {

/// Flat (unweighted) set of voxel offsets. Factory-built elements always
/// contain the origin and are symmetric under negation, which makes the
/// restricted-window boundary rule in erode/dilate well defined (the
/// in-bounds window is never empty) and spares reflection bookkeeping.
struct StructuringElement {
    enum class Kind { Sphere, Line };
    Kind kind = Kind::Sphere;
    int diameter = 1;                       // voxels; line length for Kind::Line
    std::array<double, 3> axis = {0, 0, 0}; // unit direction for lines, zero otherwise
    std::vector<std::array<int, 3>> offsets;
};

/// Unit line orientations on the upper hemisphere. Same n always produces
/// the identical set; no two entries are parallel or antipodal.
struct DirectionSet {
    int n = 0;
    std::vector<std::array<double, 3>> vectors;
    std::vector<std::array<double, 2>> angles; // (theta, phi) per vector
};

/// Closed Euclidean ball of diameter d (odd): offsets with
/// 4*(dx^2+dy^2+dz^2) <= d^2. d=1 is the single-voxel element.
StructuringElement make_sphere_se(int diameter);

/// Centered digital segment of length d along a direction: round(t*v) for
/// t = -(d-1)/2 ... (d-1)/2, rounded half-away-from-zero per component,
/// deduplicated, origin always included.
StructuringElement make_line_se(int length, const std::array<double, 3>& axis);

/// Deterministic golden-angle spiral on the upper hemisphere, anchored at
/// the pole, with a z floor of 0.6/sqrt(n) keeping near-equator samples
/// from collapsing onto the same line from opposite sides.
DirectionSet make_direction_set(int n);

Volume erode(const Volume& v, const StructuringElement& se, int threads = 1);
Volume dilate(const Volume& v, const StructuringElement& se, int threads = 1);
Volume opening(const Volume& v, const StructuringElement& se, int threads = 1);
Volume closing(const Volume& v, const StructuringElement& se, int threads = 1);
Volume top_hat(const Volume& v, const StructuringElement& se, int threads = 1);    // v - opening, >= 0
Volume bottom_hat(const Volume& v, const StructuringElement& se, int threads = 1); // v - closing, <= 0

} // namespace bh3d

#endif
