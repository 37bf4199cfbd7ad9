#pragma once

#include "bowlerhat3d/volume.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace bh3d {

struct RocCurve {
    std::vector<double> thresholds;            // descending, 1.0 down to 0.0
    std::vector<std::array<double, 2>> points; // (fpr, tpr) per threshold
    double auc = 0.0;
};

// score >= threshold counts as positive. scores must lie in [0,1]; truth must
// be binary {0,1} with both classes present.
RocCurve roc(const Volume& scores, const Volume& truth, int n_thresholds = 1024);

struct AucRow {
    std::string method;
    double auc = 0.0;
};

// One row per method, sorted descending by auc.
std::vector<AucRow> auc_table(const std::vector<std::pair<std::string, const Volume*>>& methods,
                              const Volume& truth, int n_thresholds = 1024);

// 10*log10(peak^2/MSE); +infinity when the volumes are identical.
double psnr(const Volume& reference, const Volume& test, double peak);

struct Profile {
    std::vector<double> positions; // voxel units from p0, strictly increasing
    std::vector<double> values;
    std::array<double, 3> p0{}, p1{};
    std::string provenance;
};

// Trilinear samples at n evenly spaced points on the segment p0 -> p1.
Profile extract_profile(const Volume& v, const std::array<double, 3>& p0,
                        const std::array<double, 3>& p1, int n_samples);

// Interpolated width at half of (max - baseline), baseline = mean of the two
// endpoint values. Flat-topped peaks measure from the plateau edges.
double fwhm(const Profile& profile);

void write_roc_csv(const RocCurve& curve, const std::string& path);
void write_auc_csv(const std::vector<AucRow>& rows, const std::string& path);
void write_profile_csv(const Profile& profile, const std::string& path);

} // namespace bh3d
