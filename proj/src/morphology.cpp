#include "bowlerhat3d/morphology.hpp"
#include "bowlerhat3d/errors.hpp"
#include "bowlerhat3d/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace bh3d {

namespace {

void sort_and_finalize(StructuringElement& se) {
    std::sort(se.offsets.begin(), se.offsets.end(), [](const auto& a, const auto& b) {
        if (a[2] != b[2]) return a[2] < b[2];
        if (a[1] != b[1]) return a[1] < b[1];
        return a[0] < b[0];
    });
}

} // namespace

StructuringElement make_sphere_se(int diameter) {
    if (diameter < 1 || diameter % 2 == 0)
        fail(ErrorCode::BadDiameter,
             "sphere diameter must be odd and >= 1, got " + std::to_string(diameter));
    StructuringElement se;
    se.kind = StructuringElement::Kind::Sphere;
    se.diameter = diameter;
    const int r = diameter / 2;
    const long long d2 = static_cast<long long>(diameter) * diameter;
    for (int dz = -r; dz <= r; ++dz)
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                const long long n2 = static_cast<long long>(dx) * dx +
                                     static_cast<long long>(dy) * dy +
                                     static_cast<long long>(dz) * dz;
                if (4 * n2 <= d2) se.offsets.push_back({dx, dy, dz});
            }
    sort_and_finalize(se);
    return se;
}

StructuringElement make_line_se(int length, const std::array<double, 3>& axis) {
    if (length < 1)
        fail(ErrorCode::BadDiameter, "line length must be >= 1, got " + std::to_string(length));
    const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (norm < 1e-12) fail(ErrorCode::ZeroVector, "line direction must be a nonzero vector");
    const std::array<double, 3> u = {axis[0] / norm, axis[1] / norm, axis[2] / norm};

    std::set<std::array<int, 3>> unique;
    unique.insert({0, 0, 0});
    const double half = (length - 1) / 2.0;
    for (int i = 0; i < length; ++i) {
        const double t = i - half;
        unique.insert({static_cast<int>(std::round(t * u[0])),
                       static_cast<int>(std::round(t * u[1])),
                       static_cast<int>(std::round(t * u[2]))});
    }

    StructuringElement se;
    se.kind = StructuringElement::Kind::Line;
    se.diameter = length;
    se.axis = u;
    se.offsets.assign(unique.begin(), unique.end());
    sort_and_finalize(se);
    return se;
}

DirectionSet make_direction_set(int n) {
    if (n < 1) fail(ErrorCode::BadDirections, "direction count must be >= 1, got " + std::to_string(n));
    DirectionSet set;
    set.n = n;
    set.vectors.reserve(static_cast<std::size_t>(n));
    set.angles.reserve(static_cast<std::size_t>(n));
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double z_floor = n > 1 ? std::min(0.5, 0.6 / std::sqrt(static_cast<double>(n))) : 0.0;
    for (int k = 0; k < n; ++k) {
        const double z = k == 0 ? 1.0 : 1.0 - (1.0 - z_floor) * (k + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = std::fmod(k * golden_angle, 2.0 * std::numbers::pi);
        set.vectors.push_back({r * std::cos(phi), r * std::sin(phi), z});
        set.angles.push_back({std::acos(z), phi});
    }
    return set;
}

namespace {

enum class Extremum { Min, Max };

template <Extremum E>
Volume apply_flat(const Volume& v, const StructuringElement& se, int threads, const char* label) {
    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance + " | " + label);
    const int nx = v.nx, ny = v.ny, nz = v.nz;
    const std::size_t k = se.offsets.size();

    // Flat strides are valid only while every probed voxel is in bounds;
    // the interior box below is exactly that region.
    std::vector<std::ptrdiff_t> strides(k);
    int lox = 0, hix = 0, loy = 0, hiy = 0, loz = 0, hiz = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& o = se.offsets[i];
        strides[i] = o[0] + static_cast<std::ptrdiff_t>(nx) * (o[1] + static_cast<std::ptrdiff_t>(ny) * o[2]);
        lox = std::min(lox, o[0]); hix = std::max(hix, o[0]);
        loy = std::min(loy, o[1]); hiy = std::max(hiy, o[1]);
        loz = std::min(loz, o[2]); hiz = std::max(hiz, o[2]);
    }
    const int x0 = -lox, x1 = nx - hix; // interior: x in [x0, x1)
    const int y0 = -loy, y1 = ny - hiy;
    const int z0 = -loz, z1 = nz - hiz;

    const float* src = v.data.data();
    float* dst = out.data.data();

    auto probe_checked = [&](int x, int y, int z) {
        float best = src[v.index(x, y, z)];
        for (std::size_t i = 0; i < k; ++i) {
            const auto& o = se.offsets[i];
            const int px = x + o[0], py = y + o[1], pz = z + o[2];
            if (px < 0 || px >= nx || py < 0 || py >= ny || pz < 0 || pz >= nz) continue;
            const float s = src[v.index(px, py, pz)];
            if constexpr (E == Extremum::Min) best = std::min(best, s);
            else best = std::max(best, s);
        }
        return best;
    };

    parallel_chunks(0, nz, threads, [&](std::int64_t zb, std::int64_t ze) {
        for (int z = static_cast<int>(zb); z < static_cast<int>(ze); ++z) {
            const bool z_interior = z >= z0 && z < z1;
            for (int y = 0; y < ny; ++y) {
                const bool zy_interior = z_interior && y >= y0 && y < y1;
                const std::size_t row = v.index(0, y, z);
                int x = 0;
                if (zy_interior && x0 < x1) {
                    for (; x < x0; ++x) dst[row + x] = probe_checked(x, y, z);
                    for (; x < x1; ++x) {
                        const std::size_t p = row + static_cast<std::size_t>(x);
                        float best = src[p + strides[0]];
                        for (std::size_t i = 1; i < k; ++i) {
                            const float s = src[p + strides[i]];
                            if constexpr (E == Extremum::Min) best = std::min(best, s);
                            else best = std::max(best, s);
                        }
                        dst[p] = best;
                    }
                }
                for (; x < nx; ++x) dst[row + x] = probe_checked(x, y, z);
            }
        }
    });
    return out;
}

} // namespace

Volume erode(const Volume& v, const StructuringElement& se, int threads) {
    return apply_flat<Extremum::Min>(v, se, threads, "erode");
}

Volume dilate(const Volume& v, const StructuringElement& se, int threads) {
    return apply_flat<Extremum::Max>(v, se, threads, "dilate");
}

Volume opening(const Volume& v, const StructuringElement& se, int threads) {
    Volume out = dilate(erode(v, se, threads), se, threads);
    out.provenance = v.provenance + " | opening";
    return out;
}

Volume closing(const Volume& v, const StructuringElement& se, int threads) {
    Volume out = erode(dilate(v, se, threads), se, threads);
    out.provenance = v.provenance + " | closing";
    return out;
}

Volume top_hat(const Volume& v, const StructuringElement& se, int threads) {
    Volume opened = opening(v, se, threads);
    for (std::size_t i = 0; i < v.size(); ++i) opened.data[i] = v.data[i] - opened.data[i];
    opened.provenance = v.provenance + " | top_hat";
    return opened;
}

Volume bottom_hat(const Volume& v, const StructuringElement& se, int threads) {
    Volume closed = closing(v, se, threads);
    for (std::size_t i = 0; i < v.size(); ++i) closed.data[i] = v.data[i] - closed.data[i];
    closed.provenance = v.provenance + " | bottom_hat";
    return closed;
}

} // namespace bh3d
