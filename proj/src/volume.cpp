#include "bowlerhat3d/volume.hpp"
#include "bowlerhat3d/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace bh3d {

Volume::Volume(int nx_, int ny_, int nz_, float fill, std::string provenance_)
    : nx(nx_), ny(ny_), nz(nz_), provenance(std::move(provenance_)) {
    if (nx <= 0 || ny <= 0 || nz <= 0)
        fail(ErrorCode::BadDims, "volume dims must be positive, got " + std::to_string(nx) + "x" +
                                     std::to_string(ny) + "x" + std::to_string(nz));
    data.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz),
                fill);
}

Dtype dtype_from_string(const std::string& name) {
    if (name == "u8") return Dtype::U8;
    if (name == "u16") return Dtype::U16;
    if (name == "f32") return Dtype::F32;
    fail(ErrorCode::UnknownDtype, "unknown dtype \"" + name + "\" (expected u8, u16 or f32)");
}

const char* dtype_name(Dtype dtype) {
    switch (dtype) {
        case Dtype::U8: return "u8";
        case Dtype::U16: return "u16";
        case Dtype::F32: return "f32";
    }
    return "?";
}

std::size_t dtype_size(Dtype dtype) {
    switch (dtype) {
        case Dtype::U8: return 1;
        case Dtype::U16: return 2;
        case Dtype::F32: return 4;
    }
    return 0;
}

Volume load_volume(const std::string& header_path) {
    std::ifstream in(header_path);
    if (!in) fail(ErrorCode::BadHeader, "cannot open header " + header_path);

    json header;
    try {
        header = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::BadHeader, std::string("header parse failed: ") + e.what());
    }

    if (!header.contains("dims") || !header["dims"].is_array() || header["dims"].size() != 3)
        fail(ErrorCode::BadHeader, "header is missing a 3-element dims array: " + header_path);
    long long d[3];
    for (int i = 0; i < 3; ++i) {
        if (!header["dims"][i].is_number_integer())
            fail(ErrorCode::BadDims, "dims entries must be integers: " + header_path);
        d[i] = header["dims"][i].get<long long>();
        if (d[i] <= 0)
            fail(ErrorCode::BadDims, "dims must be positive, got " + header["dims"].dump());
    }
    if (!header.contains("dtype") || !header["dtype"].is_string())
        fail(ErrorCode::BadHeader, "header is missing dtype: " + header_path);
    const Dtype dtype = dtype_from_string(header["dtype"].get<std::string>());
    if (header.contains("endian") && header["endian"].get<std::string>() != "little")
        fail(ErrorCode::BadHeader, "only little-endian payloads are supported");
    if (header.contains("order") && header["order"].get<std::string>() != "x-fastest")
        fail(ErrorCode::BadHeader, "only x-fastest ordering is supported");
    if (!header.contains("raw") || !header["raw"].is_string())
        fail(ErrorCode::BadHeader, "header is missing the raw filename: " + header_path);

    const fs::path raw_path = fs::path(header_path).parent_path() / header["raw"].get<std::string>();
    std::error_code ec;
    if (!fs::exists(raw_path, ec) || ec)
        fail(ErrorCode::MissingRaw, "raw payload not found: " + raw_path.string());

    const std::uintmax_t expected =
        static_cast<std::uintmax_t>(d[0]) * static_cast<std::uintmax_t>(d[1]) *
        static_cast<std::uintmax_t>(d[2]) * dtype_size(dtype);
    const std::uintmax_t actual = fs::file_size(raw_path, ec);
    if (ec) fail(ErrorCode::MissingRaw, "cannot stat raw payload: " + raw_path.string());
    if (actual < expected)
        fail(ErrorCode::RawTooSmall, raw_path.string() + " holds " + std::to_string(actual) +
                                         " bytes, expected " + std::to_string(expected));
    if (actual > expected)
        fail(ErrorCode::RawTooLarge, raw_path.string() + " holds " + std::to_string(actual) +
                                         " bytes, expected " + std::to_string(expected));

    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) fail(ErrorCode::MissingRaw, "cannot open raw payload: " + raw_path.string());
    std::vector<unsigned char> bytes(static_cast<std::size_t>(expected));
    raw.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (raw.gcount() != static_cast<std::streamsize>(bytes.size()))
        fail(ErrorCode::RawTooSmall, "short read from " + raw_path.string());

    Volume v(static_cast<int>(d[0]), static_cast<int>(d[1]), static_cast<int>(d[2]), 0.0f, header_path);
    const std::size_t n = v.size();
    switch (dtype) {
        case Dtype::U8:
            for (std::size_t i = 0; i < n; ++i) v.data[i] = static_cast<float>(bytes[i]);
            break;
        case Dtype::U16:
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint16_t value =
                    static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
                v.data[i] = static_cast<float>(value);
            }
            break;
        case Dtype::F32:
            static_assert(sizeof(float) == 4);
            std::memcpy(v.data.data(), bytes.data(), bytes.size());
            for (std::size_t i = 0; i < n; ++i)
                if (!std::isfinite(v.data[i]))
                    fail(ErrorCode::NonFiniteData,
                         "f32 payload contains NaN/Inf at flat index " + std::to_string(i));
            break;
    }
    return v;
}

void save_volume(const Volume& v, const std::string& header_path, Dtype dtype) {
    const fs::path hp(header_path);
    const std::string raw_name = hp.stem().string() + ".raw";
    const fs::path raw_path = hp.parent_path() / raw_name;

    const std::size_t n = v.size();
    std::vector<unsigned char> bytes(n * dtype_size(dtype));
    switch (dtype) {
        case Dtype::U8:
            for (std::size_t i = 0; i < n; ++i) {
                const float clamped = std::clamp(v.data[i], 0.0f, 255.0f);
                bytes[i] = static_cast<unsigned char>(std::lround(clamped));
            }
            break;
        case Dtype::U16:
            for (std::size_t i = 0; i < n; ++i) {
                const float clamped = std::clamp(v.data[i], 0.0f, 65535.0f);
                const long rounded = std::lround(clamped);
                bytes[2 * i] = static_cast<unsigned char>(rounded & 0xff);
                bytes[2 * i + 1] = static_cast<unsigned char>((rounded >> 8) & 0xff);
            }
            break;
        case Dtype::F32:
            std::memcpy(bytes.data(), v.data.data(), bytes.size());
            break;
    }

    json header = {
        {"dims", {v.nx, v.ny, v.nz}},
        {"dtype", dtype_name(dtype)},
        {"order", "x-fastest"},
        {"endian", "little"},
        {"raw", raw_name},
    };
    std::ofstream hout(hp);
    if (!hout) fail(ErrorCode::Unwritable, "cannot write header " + hp.string());
    hout << header.dump(2) << "\n";
    hout.close();
    if (!hout) fail(ErrorCode::Unwritable, "failed writing header " + hp.string());

    std::ofstream rout(raw_path, std::ios::binary);
    if (!rout) fail(ErrorCode::Unwritable, "cannot write raw payload " + raw_path.string());
    rout.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    rout.close();
    if (!rout) fail(ErrorCode::Unwritable, "failed writing raw payload " + raw_path.string());
}

float min_value(const Volume& v) {
    return *std::min_element(v.data.begin(), v.data.end());
}

float max_value(const Volume& v) {
    return *std::max_element(v.data.begin(), v.data.end());
}

Volume normalize(const Volume& v) {
    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance + " | normalize");
    const float lo = min_value(v);
    const float hi = max_value(v);
    if (hi == lo) return out;
    const float range = hi - lo;
    for (std::size_t i = 0; i < v.size(); ++i) out.data[i] = (v.data[i] - lo) / range;
    return out;
}

} // namespace bh3d
