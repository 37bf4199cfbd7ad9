#ifndef BH3D_VOLUME_HPP
#define BH3D_VOLUME_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace bh3d {

/// Dense 3D scalar grid, 32-bit float, x-fastest layout:
/// flat index = x + nx*(y + ny*z). Values are finite after every public
/// operation; operations return new volumes rather than mutating inputs.
struct Volume {
    int nx = 0, ny = 0, nz = 0;
    std::vector<float> data;
    std::string provenance;

    Volume() = default;
    Volume(int nx, int ny, int nz, float fill = 0.0f, std::string provenance = {});

    std::size_t size() const { return data.size(); }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(z));
    }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    bool same_dims(const Volume& other) const {
        return nx == other.nx && ny == other.ny && nz == other.nz;
    }
    std::array<int, 3> dims() const { return {nx, ny, nz}; }
};

enum class Dtype { U8, U16, F32 };

Dtype dtype_from_string(const std::string& name);
const char* dtype_name(Dtype dtype);
std::size_t dtype_size(Dtype dtype);

/// Read a JSON sidecar header plus its sibling raw payload. u8/u16 payloads
/// are widened to f32 by exact value cast, no rescaling.
Volume load_volume(const std::string& header_path);

/// Write header JSON + raw payload. f32 round-trips bit-exactly; u8/u16
/// clamp to the dtype range then round half-away-from-zero.
void save_volume(const Volume& v, const std::string& header_path, Dtype dtype);

/// Affine map onto [0,1] via (x - min) / (max - min); a constant volume
/// maps to all zeros. Idempotent on non-constant input.
Volume normalize(const Volume& v);

float min_value(const Volume& v);
float max_value(const Volume& v);

} // namespace bh3d

#endif
