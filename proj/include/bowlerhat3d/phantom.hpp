#pragma once

#include "bowlerhat3d/volume.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bh3d {

// A voxel is foreground iff its center lies within diameter/2 of the shape's
// medial axis (segment, union of segments, or point).
struct TubeShape {
    std::array<double, 3> p0{}, p1{};
    int diameter = 1;
};

struct YJunctionShape {
    std::array<double, 3> center{};
    std::array<std::array<double, 3>, 3> dirs{};
    double length = 0.0;
    int diameter = 1;
};

struct XCrossingShape {
    std::array<double, 3> center{};
    std::array<double, 3> dir_a{}, dir_b{};
    double length = 0.0;
    int diameter = 1;
};

struct BallShape {
    std::array<double, 3> center{};
    int diameter = 1;
};

using PhantomShape = std::variant<TubeShape, YJunctionShape, XCrossingShape, BallShape>;

struct PhantomSpec {
    std::array<int, 3> dims{};
    std::vector<PhantomShape> shapes;
    float foreground = 1.0f;
    float background = 0.0f;
    double softness = 0.0; // sigma of optional Gaussian edge smoothing
};

// JSON document mirroring the field names above; "kind" selects the shape,
// "composite" carries a "shapes" array.
PhantomSpec parse_phantom_spec(const std::string& json_text);

// Intensity volume (smoothed when softness > 0) plus binary {0,1} ground
// truth computed before any smoothing.
std::pair<Volume, Volume> generate_phantom(const PhantomSpec& spec, int threads = 1);

// out(p) = v(p) + amplitude * dot(g, p_normalized), coordinates mapped to [0,1].
Volume add_illumination_ramp(const Volume& v, const std::array<double, 3>& g, double amplitude);

// Intensities are interpreted on the 0-255 scale; output is clamped to it.
struct NoiseSpec {
    enum class Model { Gaussian, Speckle, SaltPepper };
    Model model = Model::Gaussian;
    double sigma = 0.0; // Gaussian / Speckle level, 0-255 scale
    double rho = 0.0;   // SaltPepper density in [0,1]
    std::uint64_t seed = 0;
};

Volume add_noise(const Volume& v, const NoiseSpec& spec);

} // namespace bh3d
