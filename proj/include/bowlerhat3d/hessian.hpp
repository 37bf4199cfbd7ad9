#pragma once

#include "bowlerhat3d/volume.hpp"

#include <array>
#include <optional>
#include <vector>

namespace bh3d {

// Six unique components of the Gaussian-smoothed Hessian at one scale, plus
// per-voxel eigenvalues sorted by |.| ascending once compute_eigenvalues ran.
struct HessianField {
    double s = 1.0;
    Volume h11, h22, h33, h12, h13, h23;
    Volume l1, l2, l3;
    bool has_eigenvalues = false;
};

struct VesselnessParams {
    double alpha = 0.5;
    double beta = 0.5;
    std::optional<double> c; // unset: half the max Frobenius response, per scale
    std::vector<double> scales = {1.0, 1.5, 2.0, 3.0, 4.0};
};

struct VolumeRatioParams {
    double tau = 0.5;
    std::vector<double> scales = {1.0, 1.5, 2.0, 3.0, 4.0};
};

// Separable convolution with derivative-of-Gaussian kernels, truncated at 4s,
// mirror boundaries, fixed z-y-x pass order. Derivatives are unnormalized
// (no s^2 factor); enhancers apply their own scale normalization.
HessianField gaussian_hessian(const Volume& v, double s, int threads = 1);

// Plain Gaussian smoothing with the same kernel, truncation, and boundaries.
Volume gaussian_smooth(const Volume& v, double s, int threads = 1);

// Fills l1,l2,l3 from the stored components.
void compute_eigenvalues(HessianField& f, int threads = 1);

// Eigenvalues of a symmetric 3x3, sorted by absolute value ascending.
std::array<double, 3> eig_sym3(double a11, double a22, double a33, double a12, double a13,
                               double a23);

// Values plus orthonormal eigenvectors (columns), same ordering.
struct EigSym3Full {
    std::array<double, 3> values;
    std::array<std::array<double, 3>, 3> vectors;
};
EigSym3Full eig_sym3_full(double a11, double a22, double a33, double a12, double a13, double a23);

// Per-voxel response for eigenvalues sorted by |.| ascending; zero unless both
// larger-magnitude eigenvalues are negative (bright structures).
double vesselness_response(double l1, double l2, double l3, double alpha, double beta, double c);

// Multiscale maximum of vesselness_response over p.scales.
Volume vesselness(const Volume& v, const VesselnessParams& p, int threads = 1);

// Single-scale measure from the alpha-modified eigenvalues, normalized by the
// strongest negative response over the volume. degenerate (if given) reports
// the no-negative-response case, which yields an all-zero output.
Volume neuriteness(const Volume& v, double s, double alpha, int threads = 1,
                   bool* degenerate = nullptr);

// Per-voxel response given the sign-flipped scaled eigenvalue -l2*s^2 and its
// regularized counterpart; rises from 0 to a plateau of 1 at l2 >= l_rho / 2.
double volume_ratio_response(double l2, double l_rho);

// Multiscale regularized-eigenvalue volume ratio, bounded to [0,1].
Volume volume_ratio(const Volume& v, const VolumeRatioParams& p, int threads = 1);

} // namespace bh3d
