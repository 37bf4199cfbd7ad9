#include "bowlerhat3d/eval.hpp"
#include "bowlerhat3d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace bh3d {

RocCurve roc(const Volume& scores, const Volume& truth, int n_thresholds) {
    if (!scores.same_dims(truth))
        fail(ErrorCode::DimsMismatch, "scores and truth disagree on dims");
    if (n_thresholds < 1)
        fail(ErrorCode::BadThresholds,
             "threshold count must be >= 1, got " + std::to_string(n_thresholds));

    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const float t = truth.data[i];
        if (t == 1.0f) ++pos;
        else if (t == 0.0f) ++neg;
        else fail(ErrorCode::BadParam, "truth must be binary {0,1}");
        const float s = scores.data[i];
        if (!(s >= 0.0f && s <= 1.0f))
            fail(ErrorCode::BadParam, "scores must be normalized to [0,1]");
    }
    if (pos == 0 || neg == 0)
        fail(ErrorCode::DegenerateTruth, "truth needs at least one voxel of each class");

    RocCurve curve;
    const int n = n_thresholds;
    curve.thresholds.resize(n + 1);
    for (int i = 0; i <= n; ++i) curve.thresholds[i] = 1.0 - static_cast<double>(i) / n;

    // each voxel turns positive at the first threshold it reaches; prefix
    // sums then give exact counts at every threshold
    std::vector<std::size_t> hist_p(n + 1, 0), hist_n(n + 1, 0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double s = scores.data[i];
        const auto it = std::partition_point(curve.thresholds.begin(), curve.thresholds.end(),
                                             [&](double t) { return t > s; });
        const auto idx = static_cast<std::size_t>(it - curve.thresholds.begin());
        if (truth.data[i] == 1.0f) ++hist_p[idx];
        else ++hist_n[idx];
    }

    curve.points.resize(n + 1);
    std::size_t cum_p = 0, cum_n = 0;
    for (int i = 0; i <= n; ++i) {
        cum_p += hist_p[i];
        cum_n += hist_n[i];
        curve.points[i] = {static_cast<double>(cum_n) / neg, static_cast<double>(cum_p) / pos};
    }

    double auc = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& a = curve.points[i];
        const auto& b = curve.points[i + 1];
        auc += (b[0] - a[0]) * (a[1] + b[1]) / 2.0;
    }
    curve.auc = auc;
    return curve;
}

std::vector<AucRow> auc_table(const std::vector<std::pair<std::string, const Volume*>>& methods,
                              const Volume& truth, int n_thresholds) {
    if (methods.empty()) fail(ErrorCode::EmptyInput, "auc_table needs at least one method");
    std::vector<AucRow> rows;
    rows.reserve(methods.size());
    for (const auto& [name, vol] : methods)
        rows.push_back({name, roc(*vol, truth, n_thresholds).auc});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const AucRow& a, const AucRow& b) { return a.auc > b.auc; });
    return rows;
}

double psnr(const Volume& reference, const Volume& test, double peak) {
    if (!reference.same_dims(test))
        fail(ErrorCode::DimsMismatch, "reference and test disagree on dims");
    if (!(peak > 0.0)) fail(ErrorCode::BadParam, "peak must be positive");
    double mse = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = static_cast<double>(reference.data[i]) - test.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

namespace {

double trilinear(const Volume& v, double x, double y, double z) {
    const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, v.nx - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, v.ny - 1);
    const int z0 = std::clamp(static_cast<int>(std::floor(z)), 0, v.nz - 1);
    const int x1 = std::min(x0 + 1, v.nx - 1);
    const int y1 = std::min(y0 + 1, v.ny - 1);
    const int z1 = std::min(z0 + 1, v.nz - 1);
    const double fx = x - x0, fy = y - y0, fz = z - z0;
    const double c00 = v.at(x0, y0, z0) * (1 - fx) + v.at(x1, y0, z0) * fx;
    const double c10 = v.at(x0, y1, z0) * (1 - fx) + v.at(x1, y1, z0) * fx;
    const double c01 = v.at(x0, y0, z1) * (1 - fx) + v.at(x1, y0, z1) * fx;
    const double c11 = v.at(x0, y1, z1) * (1 - fx) + v.at(x1, y1, z1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz;
}

} // namespace

Profile extract_profile(const Volume& v, const std::array<double, 3>& p0,
                        const std::array<double, 3>& p1, int n_samples) {
    if (n_samples < 2)
        fail(ErrorCode::BadProfile, "n_samples must be >= 2, got " + std::to_string(n_samples));
    const std::array<int, 3> dims = {v.nx, v.ny, v.nz};
    for (int i = 0; i < 3; ++i)
        if (p0[i] < 0.0 || p0[i] > dims[i] - 1.0 || p1[i] < 0.0 || p1[i] > dims[i] - 1.0)
            fail(ErrorCode::OutOfBounds, "profile endpoints must lie inside the volume");
    const double dx = p1[0] - p0[0], dy = p1[1] - p0[1], dz = p1[2] - p0[2];
    const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (len == 0.0) fail(ErrorCode::BadProfile, "profile endpoints coincide");

    Profile prof;
    prof.p0 = p0;
    prof.p1 = p1;
    prof.provenance = v.provenance;
    prof.positions.resize(n_samples);
    prof.values.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double f = static_cast<double>(i) / (n_samples - 1);
        prof.positions[i] = f * len;
        prof.values[i] = trilinear(v, p0[0] + f * dx, p0[1] + f * dy, p0[2] + f * dz);
    }
    return prof;
}

double fwhm(const Profile& profile) {
    const std::size_t n = profile.values.size();
    if (n < 2) fail(ErrorCode::BadProfile, "profile needs at least 2 samples");
    const double baseline = (profile.values.front() + profile.values.back()) / 2.0;
    const double peak = *std::max_element(profile.values.begin(), profile.values.end());
    if (!(peak > baseline)) fail(ErrorCode::NoPeak, "no peak above the endpoint baseline");
    const double h = baseline + (peak - baseline) / 2.0;

    // flat-topped peaks: measure outward from the plateau edges
    const std::size_t first = static_cast<std::size_t>(
        std::find(profile.values.begin(), profile.values.end(), peak) - profile.values.begin());
    const std::size_t last =
        n - 1 -
        static_cast<std::size_t>(std::find(profile.values.rbegin(), profile.values.rend(), peak) -
                                 profile.values.rbegin());

    double left = 0.0;
    {
        std::size_t i = first;
        while (i > 0 && profile.values[i - 1] >= h) --i;
        if (i == 0) fail(ErrorCode::NoPeak, "half level never crossed on the left");
        const double v0 = profile.values[i - 1], v1 = profile.values[i];
        const double p0 = profile.positions[i - 1], p1 = profile.positions[i];
        left = p0 + (h - v0) / (v1 - v0) * (p1 - p0);
    }
    double right = 0.0;
    {
        std::size_t i = last;
        while (i + 1 < n && profile.values[i + 1] >= h) ++i;
        if (i + 1 == n) fail(ErrorCode::NoPeak, "half level never crossed on the right");
        const double v0 = profile.values[i], v1 = profile.values[i + 1];
        const double p0 = profile.positions[i], p1 = profile.positions[i + 1];
        right = p0 + (h - v0) / (v1 - v0) * (p1 - p0);
    }
    return right - left;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) fail(ErrorCode::Unwritable, "cannot open for writing: " + path);
    return f;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

} // namespace

void write_roc_csv(const RocCurve& curve, const std::string& path) {
    auto f = open_out(path);
    f << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
        f << fmt(curve.thresholds[i]) << ',' << fmt(curve.points[i][0]) << ','
          << fmt(curve.points[i][1]) << '\n';
    f << "# auc=" << fmt(curve.auc) << '\n';
    if (!f) fail(ErrorCode::Unwritable, "write failed: " + path);
}

void write_auc_csv(const std::vector<AucRow>& rows, const std::string& path) {
    auto f = open_out(path);
    f << "method,auc\n";
    for (const auto& r : rows) f << r.method << ',' << fmt(r.auc) << '\n';
    if (!f) fail(ErrorCode::Unwritable, "write failed: " + path);
}

void write_profile_csv(const Profile& profile, const std::string& path) {
    auto f = open_out(path);
    f << "position,intensity\n";
    for (std::size_t i = 0; i < profile.positions.size(); ++i)
        f << fmt(profile.positions[i]) << ',' << fmt(profile.values[i]) << '\n';
    if (!f) fail(ErrorCode::Unwritable, "write failed: " + path);
}

} // namespace bh3d
