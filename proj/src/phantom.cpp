#include "bowlerhat3d/phantom.hpp"
#include "bowlerhat3d/errors.hpp"
#include "bowlerhat3d/hessian.hpp"
#include "bowlerhat3d/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace bh3d {

namespace {

using nlohmann::json;

std::array<double, 3> parse_vec3(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_array() || j[field].size() != 3)
        fail(ErrorCode::BadSpec, std::string("phantom spec: '") + field + "' must be a 3-array");
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i) {
        if (!j[field][i].is_number())
            fail(ErrorCode::BadSpec, std::string("phantom spec: '") + field + "' must be numeric");
        v[i] = j[field][i].get<double>();
    }
    return v;
}

int parse_diameter(const json& j) {
    if (!j.contains("diameter") || !j["diameter"].is_number_integer())
        fail(ErrorCode::BadSpec, "phantom spec: 'diameter' must be an integer");
    return j["diameter"].get<int>();
}

double parse_length(const json& j) {
    if (!j.contains("length") || !j["length"].is_number())
        fail(ErrorCode::BadSpec, "phantom spec: 'length' must be numeric");
    return j["length"].get<double>();
}

PhantomShape parse_shape(const json& j) {
    if (!j.contains("kind") || !j["kind"].is_string())
        fail(ErrorCode::BadSpec, "phantom spec: shape needs a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "tube") {
        TubeShape t;
        t.p0 = parse_vec3(j, "p0");
        t.p1 = parse_vec3(j, "p1");
        t.diameter = parse_diameter(j);
        return t;
    }
    if (kind == "yjunction") {
        YJunctionShape y;
        y.center = parse_vec3(j, "center");
        if (!j.contains("dirs") || !j["dirs"].is_array() || j["dirs"].size() != 3)
            fail(ErrorCode::BadSpec, "phantom spec: 'dirs' must be an array of 3 vectors");
        for (int i = 0; i < 3; ++i) {
            const json wrap = {{"d", j["dirs"][i]}};
            y.dirs[i] = parse_vec3(wrap, "d");
        }
        y.length = parse_length(j);
        y.diameter = parse_diameter(j);
        return y;
    }
    if (kind == "xcrossing") {
        XCrossingShape x;
        x.center = parse_vec3(j, "center");
        x.dir_a = parse_vec3(j, "dir_a");
        x.dir_b = parse_vec3(j, "dir_b");
        x.length = parse_length(j);
        x.diameter = parse_diameter(j);
        return x;
    }
    if (kind == "ball") {
        BallShape b;
        b.center = parse_vec3(j, "center");
        b.diameter = parse_diameter(j);
        return b;
    }
    fail(ErrorCode::BadSpec, "phantom spec: unknown kind '" + kind + "'");
}

} // namespace

PhantomSpec parse_phantom_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::BadSpec, std::string("phantom spec: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::BadSpec, "phantom spec: top level must be an object");

    PhantomSpec spec;
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3)
        fail(ErrorCode::BadSpec, "phantom spec: 'dims' must be a 3-array");
    for (int i = 0; i < 3; ++i) {
        if (!j["dims"][i].is_number_integer())
            fail(ErrorCode::BadSpec, "phantom spec: 'dims' must hold integers");
        spec.dims[i] = j["dims"][i].get<int>();
    }
    const auto number_field = [&](const char* name, auto fallback) {
        if (!j.contains(name)) return fallback;
        if (!j[name].is_number())
            fail(ErrorCode::BadSpec, std::string("phantom spec: '") + name + "' must be numeric");
        return static_cast<decltype(fallback)>(j[name].get<double>());
    };
    spec.foreground = number_field("foreground", spec.foreground);
    spec.background = number_field("background", spec.background);
    spec.softness = number_field("softness", spec.softness);

    if (!j.contains("kind") || !j["kind"].is_string())
        fail(ErrorCode::BadSpec, "phantom spec: needs a string 'kind'");
    if (j["kind"].get<std::string>() == "composite") {
        if (!j.contains("shapes") || !j["shapes"].is_array() || j["shapes"].empty())
            fail(ErrorCode::BadSpec, "phantom spec: composite needs a non-empty 'shapes' array");
        for (const auto& s : j["shapes"]) spec.shapes.push_back(parse_shape(s));
    } else {
        spec.shapes.push_back(parse_shape(j));
    }
    return spec;
}

namespace {

struct Rod {
    std::array<double, 3> a, b;
    double radius;
};

std::array<double, 3> unit(const std::array<double, 3>& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n < 1e-12) fail(ErrorCode::BadSpec, "phantom spec: direction must be a nonzero vector");
    return {v[0] / n, v[1] / n, v[2] / n};
}

std::array<double, 3> axpy(const std::array<double, 3>& p, double t,
                           const std::array<double, 3>& d) {
    return {p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2]};
}

void append_rods(const PhantomShape& shape, std::vector<Rod>& rods) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if (s.diameter < 1)
                fail(ErrorCode::BadDiameter,
                     "phantom diameter must be >= 1, got " + std::to_string(s.diameter));
            const double r = s.diameter / 2.0;
            if constexpr (std::is_same_v<T, TubeShape>) {
                rods.push_back({s.p0, s.p1, r});
            } else if constexpr (std::is_same_v<T, YJunctionShape>) {
                if (!(s.length > 0.0))
                    fail(ErrorCode::BadSpec, "phantom spec: junction length must be positive");
                for (const auto& d : s.dirs)
                    rods.push_back({s.center, axpy(s.center, s.length, unit(d)), r});
            } else if constexpr (std::is_same_v<T, XCrossingShape>) {
                if (!(s.length > 0.0))
                    fail(ErrorCode::BadSpec, "phantom spec: crossing length must be positive");
                const auto da = unit(s.dir_a), db = unit(s.dir_b);
                rods.push_back({axpy(s.center, -s.length / 2.0, da),
                                axpy(s.center, s.length / 2.0, da), r});
                rods.push_back({axpy(s.center, -s.length / 2.0, db),
                                axpy(s.center, s.length / 2.0, db), r});
            } else {
                rods.push_back({s.center, s.center, r});
            }
        },
        shape);
}

double dist2_point_rod(double px, double py, double pz, const Rod& r) {
    const double abx = r.b[0] - r.a[0], aby = r.b[1] - r.a[1], abz = r.b[2] - r.a[2];
    const double apx = px - r.a[0], apy = py - r.a[1], apz = pz - r.a[2];
    const double den = abx * abx + aby * aby + abz * abz;
    double t = 0.0;
    if (den > 0.0) t = std::clamp((apx * abx + apy * aby + apz * abz) / den, 0.0, 1.0);
    const double dx = apx - t * abx, dy = apy - t * aby, dz = apz - t * abz;
    return dx * dx + dy * dy + dz * dz;
}

} // namespace

std::pair<Volume, Volume> generate_phantom(const PhantomSpec& spec, int threads) {
    for (int i = 0; i < 3; ++i)
        if (spec.dims[i] < 1)
            fail(ErrorCode::BadDims, "phantom dims must be positive");

    std::vector<Rod> rods;
    for (const auto& s : spec.shapes) append_rods(s, rods);
    for (const auto& r : rods)
        for (int i = 0; i < 3; ++i) {
            const double lo = std::min(r.a[i], r.b[i]) - r.radius;
            const double hi = std::max(r.a[i], r.b[i]) + r.radius;
            if (lo < 0.0 || hi > spec.dims[i] - 1.0)
                fail(ErrorCode::OutOfBounds, "phantom geometry does not fit inside dims");
        }

    Volume truth(spec.dims[0], spec.dims[1], spec.dims[2], 0.0f, "phantom truth");
    parallel_chunks(0, spec.dims[2], threads, [&](std::int64_t zb, std::int64_t ze) {
        for (int z = static_cast<int>(zb); z < static_cast<int>(ze); ++z)
            for (int y = 0; y < spec.dims[1]; ++y)
                for (int x = 0; x < spec.dims[0]; ++x)
                    for (const auto& r : rods)
                        if (dist2_point_rod(x, y, z, r) <= r.radius * r.radius) {
                            truth.at(x, y, z) = 1.0f;
                            break;
                        }
    });

    Volume vol(spec.dims[0], spec.dims[1], spec.dims[2], 0.0f, "phantom");
    for (std::size_t i = 0; i < vol.size(); ++i)
        vol.data[i] = spec.background + (spec.foreground - spec.background) * truth.data[i];
    if (spec.softness > 0.0) {
        vol = gaussian_smooth(vol, spec.softness, threads);
        vol.provenance = "phantom";
    }
    return {std::move(vol), std::move(truth)};
}

Volume add_illumination_ramp(const Volume& v, const std::array<double, 3>& g, double amplitude) {
    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance + " | ramp");
    const double dx = v.nx > 1 ? 1.0 / (v.nx - 1) : 0.0;
    const double dy = v.ny > 1 ? 1.0 / (v.ny - 1) : 0.0;
    const double dz = v.nz > 1 ? 1.0 / (v.nz - 1) : 0.0;
    for (int z = 0; z < v.nz; ++z)
        for (int y = 0; y < v.ny; ++y)
            for (int x = 0; x < v.nx; ++x) {
                const double ramp = g[0] * x * dx + g[1] * y * dy + g[2] * z * dz;
                out.at(x, y, z) = static_cast<float>(v.at(x, y, z) + amplitude * ramp);
            }
    return out;
}

namespace {

// mt19937_64 plus Box-Muller, hand-rolled so the stream identity is pinned
// down rather than left to the library's normal_distribution.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const double u1 = 1.0 - to_unit(gen_()); // (0,1], keeps log() finite
        const double u2 = to_unit(gen_());
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    static double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_ = false;
};

std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n; // 2^64 mod n
    std::uint64_t r = gen();
    if (rem != 0)
        while (r >= max - rem + 1) r = gen();
    return r % n;
}

} // namespace

Volume add_noise(const Volume& v, const NoiseSpec& spec) {
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
        fail(ErrorCode::BadNoise, "noise sigma must be >= 0 and finite");
    if (!(spec.rho >= 0.0 && spec.rho <= 1.0))
        fail(ErrorCode::BadNoise, "noise rho must lie in [0,1]");

    Volume out = v;
    const std::size_t n = v.size();
    std::string label;

    switch (spec.model) {
    case NoiseSpec::Model::Gaussian: {
        NormalStream ns(spec.seed);
        for (std::size_t i = 0; i < n; ++i)
            out.data[i] = static_cast<float>(v.data[i] + spec.sigma * ns.next());
        label = "gaussian sigma=" + std::to_string(spec.sigma);
        break;
    }
    case NoiseSpec::Model::Speckle: {
        NormalStream ns(spec.seed);
        const double s = spec.sigma / 255.0;
        for (std::size_t i = 0; i < n; ++i)
            out.data[i] = static_cast<float>(v.data[i] + v.data[i] * (s * ns.next()));
        label = "speckle sigma=" + std::to_string(spec.sigma);
        break;
    }
    case NoiseSpec::Model::SaltPepper: {
        if (n > std::numeric_limits<std::uint32_t>::max())
            fail(ErrorCode::BadDims, "salt-pepper noise supports at most 2^32 voxels");
        std::mt19937_64 gen(spec.seed);
        const auto k = static_cast<std::size_t>(std::llround(spec.rho * static_cast<double>(n)));
        std::vector<std::uint32_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
        // partial Fisher-Yates: first k entries are the corrupted voxels,
        // value coins drawn afterwards in selection order
        for (std::size_t i = 0; i < k; ++i)
            std::swap(idx[i], idx[i + uniform_below(gen, n - i)]);
        for (std::size_t i = 0; i < k; ++i)
            out.data[idx[i]] = uniform_below(gen, 2) ? 255.0f : 0.0f;
        label = "saltpepper rho=" + std::to_string(spec.rho);
        break;
    }
    }

    for (float& x : out.data) x = std::clamp(x, 0.0f, 255.0f);
    out.provenance = v.provenance + " | noise(" + label + " seed=" + std::to_string(spec.seed) + ")";
    return out;
}

} // namespace bh3d
