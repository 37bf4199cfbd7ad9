#include "bowlerhat3d/hessian.hpp"
#include "bowlerhat3d/errors.hpp"
#include "bowlerhat3d/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace bh3d {

namespace {

struct Kernels {
    int radius;
    std::vector<double> g0, g1, g2;
};

Kernels make_kernels(double s) {
    Kernels k;
    // 5 sigma: the zero-sum correction below spreads the clipped tail mass
    // over the window, and at 4 sigma that residual is still visible next to
    // the second-derivative response itself
    k.radius = static_cast<int>(std::ceil(5.0 * s));
    const int r = k.radius;
    const int w = 2 * r + 1;
    k.g0.resize(w);
    k.g1.resize(w);
    k.g2.resize(w);
    const double s2 = s * s;
    double z = 0.0;
    for (int t = -r; t <= r; ++t) z += std::exp(-0.5 * t * t / s2);
    for (int t = -r; t <= r; ++t) {
        const double g = std::exp(-0.5 * t * t / s2) / z;
        k.g0[t + r] = g;
        k.g1[t + r] = -t / s2 * g;
        k.g2[t + r] = (t * t - s2) / (s2 * s2) * g;
    }
    // truncated second-derivative kernel must still annihilate constants
    double m = std::accumulate(k.g2.begin(), k.g2.end(), 0.0) / w;
    for (double& c : k.g2) c -= m;
    return k;
}

int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n - 2;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

// out(c) = sum_t k[t] in(c - t) along one axis, mirror boundary,
// double accumulation in fixed tap order.
Volume conv_axis(const Volume& v, int axis, const std::vector<double>& k, int threads) {
    const int r = (static_cast<int>(k.size()) - 1) / 2;
    const int n = axis == 0 ? v.nx : axis == 1 ? v.ny : v.nz;
    const std::ptrdiff_t stride =
        axis == 0 ? 1 : axis == 1 ? v.nx : static_cast<std::ptrdiff_t>(v.nx) * v.ny;
    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance);
    const float* src = v.data.data();
    float* dst = out.data.data();

    parallel_chunks(0, v.nz, threads, [&](std::int64_t zb, std::int64_t ze) {
        for (int z = static_cast<int>(zb); z < static_cast<int>(ze); ++z)
            for (int y = 0; y < v.ny; ++y)
                for (int x = 0; x < v.nx; ++x) {
                    const int c = axis == 0 ? x : axis == 1 ? y : z;
                    const std::size_t p = v.index(x, y, z);
                    double acc = 0.0;
                    if (c >= r && c + r < n) {
                        const float* base = src + p;
                        for (int t = -r; t <= r; ++t)
                            acc += k[t + r] * base[-t * stride];
                    } else {
                        for (int t = -r; t <= r; ++t) {
                            const int cc = reflect(c - t, n);
                            acc += k[t + r] * src[p + static_cast<std::ptrdiff_t>(cc - c) * stride];
                        }
                    }
                    dst[p] = static_cast<float>(acc);
                }
    });
    return out;
}

} // namespace

HessianField gaussian_hessian(const Volume& v, double s, int threads) {
    if (!(s > 0.0) || !std::isfinite(s))
        fail(ErrorCode::BadSigma, "sigma must be positive and finite, got " + std::to_string(s));
    const Kernels k = make_kernels(s);

    // shared partial passes, fixed z-y-x order
    const Volume az = conv_axis(v, 2, k.g0, threads);
    const Volume bz = conv_axis(v, 2, k.g1, threads);
    const Volume cz = conv_axis(v, 2, k.g2, threads);

    const Volume ay0 = conv_axis(az, 1, k.g0, threads);
    const Volume ay1 = conv_axis(az, 1, k.g1, threads);
    const Volume ay2 = conv_axis(az, 1, k.g2, threads);
    const Volume by0 = conv_axis(bz, 1, k.g0, threads);
    const Volume by1 = conv_axis(bz, 1, k.g1, threads);
    const Volume cy0 = conv_axis(cz, 1, k.g0, threads);

    HessianField f;
    f.s = s;
    f.h11 = conv_axis(ay0, 0, k.g2, threads);
    f.h22 = conv_axis(ay2, 0, k.g0, threads);
    f.h33 = conv_axis(cy0, 0, k.g0, threads);
    f.h12 = conv_axis(ay1, 0, k.g1, threads);
    f.h13 = conv_axis(by0, 0, k.g1, threads);
    f.h23 = conv_axis(by1, 0, k.g0, threads);
    const std::string tag = v.provenance + " | hessian s=" + std::to_string(s);
    f.h11.provenance = tag;
    f.h22.provenance = tag;
    f.h33.provenance = tag;
    f.h12.provenance = tag;
    f.h13.provenance = tag;
    f.h23.provenance = tag;
    f.l1 = Volume(v.nx, v.ny, v.nz, 0.0f, tag);
    f.l2 = Volume(v.nx, v.ny, v.nz, 0.0f, tag);
    f.l3 = Volume(v.nx, v.ny, v.nz, 0.0f, tag);
    return f;
}

Volume gaussian_smooth(const Volume& v, double s, int threads) {
    if (!(s > 0.0) || !std::isfinite(s))
        fail(ErrorCode::BadSigma, "sigma must be positive and finite, got " + std::to_string(s));
    const Kernels k = make_kernels(s);
    Volume out = conv_axis(conv_axis(conv_axis(v, 2, k.g0, threads), 1, k.g0, threads), 0, k.g0,
                           threads);
    out.provenance = v.provenance + " | smooth s=" + std::to_string(s);
    return out;
}

namespace {

EigSym3Full jacobi_sym3(double a11, double a22, double a33, double a12, double a13, double a23) {
    double a[3][3] = {{a11, a12, a13}, {a12, a22, a23}, {a13, a23, a33}};
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double frob = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) frob += a[i][j] * a[i][j];

    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off <= 1e-32 * frob || off == 0.0) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (int i = 0; i < 3; ++i) {
                    const double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - sn * aiq;
                    a[i][q] = sn * aip + c * aiq;
                }
                for (int j = 0; j < 3; ++j) {
                    const double apj = a[p][j], aqj = a[q][j];
                    a[p][j] = c * apj - sn * aqj;
                    a[q][j] = sn * apj + c * aqj;
                }
                for (int i = 0; i < 3; ++i) {
                    const double vip = v[i][p], viq = v[i][q];
                    v[i][p] = c * vip - sn * viq;
                    v[i][q] = sn * vip + c * viq;
                }
            }
    }

    std::array<int, 3> idx = {0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return std::abs(a[i][i]) < std::abs(a[j][j]); });
    EigSym3Full out;
    for (int i = 0; i < 3; ++i) {
        out.values[i] = a[idx[i]][idx[i]];
        for (int j = 0; j < 3; ++j) out.vectors[i][j] = v[j][idx[i]];
    }
    return out;
}

// One or two Newton steps on the characteristic polynomial tighten roots that
// the trigonometric form leaves with absolute (not relative) accuracy.
void polish_roots(double tr, double minors, double det, std::array<double, 3>& w) {
    for (double& x : w) {
        for (int it = 0; it < 2; ++it) {
            const double p = ((-x + tr) * x - minors) * x + det;
            const double dp = (-3.0 * x + 2.0 * tr) * x - minors;
            if (dp == 0.0) break;
            const double step = p / dp;
            if (!(std::abs(step) < 0.1 * (1.0 + std::abs(x)))) break;
            x -= step;
        }
    }
}

} // namespace

std::array<double, 3> eig_sym3(double a11, double a22, double a33, double a12, double a13,
                               double a23) {
    const double q = (a11 + a22 + a33) / 3.0;
    const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
    const double b11 = a11 - q, b22 = a22 - q, b33 = a33 - q;
    const double p2 = b11 * b11 + b22 * b22 + b33 * b33 + 2.0 * p1;
    const double frob2 = a11 * a11 + a22 * a22 + a33 * a33 + 2.0 * p1;
    if (p2 <= 1e-28 * frob2 || p2 == 0.0) return {q, q, q};

    const double p = std::sqrt(p2 / 6.0);
    const double c11 = b11 / p, c22 = b22 / p, c33 = b33 / p;
    const double c12 = a12 / p, c13 = a13 / p, c23 = a23 / p;
    const double detb = c11 * (c22 * c33 - c23 * c23) - c12 * (c12 * c33 - c23 * c13) +
                        c13 * (c12 * c23 - c22 * c13);
    double rr = detb / 2.0;
    rr = std::clamp(rr, -1.0, 1.0);

    std::array<double, 3> w;
    if (std::min(1.0 - rr, 1.0 + rr) < 1e-12) {
        const EigSym3Full full = jacobi_sym3(a11, a22, a33, a12, a13, a23);
        w = full.values;
    } else {
        const double phi = std::acos(rr) / 3.0;
        const double e1 = q + 2.0 * p * std::cos(phi);
        const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        const double e2 = 3.0 * q - e1 - e3;
        w = {e1, e2, e3};
    }

    const double tr = a11 + a22 + a33;
    const double minors = a11 * a22 - a12 * a12 + a11 * a33 - a13 * a13 + a22 * a33 - a23 * a23;
    const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                       a13 * (a12 * a23 - a22 * a13);
    polish_roots(tr, minors, det, w);
    std::sort(w.begin(), w.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    return w;
}

EigSym3Full eig_sym3_full(double a11, double a22, double a33, double a12, double a13, double a23) {
    return jacobi_sym3(a11, a22, a33, a12, a13, a23);
}

void compute_eigenvalues(HessianField& f, int threads) {
    const std::size_t n = f.h11.size();
    parallel_chunks(0, static_cast<std::int64_t>(n), threads,
                    [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t i = b; i < e; ++i) {
                            const auto w = eig_sym3(f.h11.data[i], f.h22.data[i], f.h33.data[i],
                                                    f.h12.data[i], f.h13.data[i], f.h23.data[i]);
                            f.l1.data[i] = static_cast<float>(w[0]);
                            f.l2.data[i] = static_cast<float>(w[1]);
                            f.l3.data[i] = static_cast<float>(w[2]);
                        }
                    });
    f.has_eigenvalues = true;
}

namespace {

void validate_scales(const std::vector<double>& scales) {
    if (scales.empty()) fail(ErrorCode::BadScales, "scale set must be non-empty");
    double prev = 0.0;
    for (double s : scales) {
        if (!(s > 0.0) || !std::isfinite(s))
            fail(ErrorCode::BadScales, "scales must be positive and finite");
        if (s <= prev) fail(ErrorCode::BadScales, "scales must be strictly increasing");
        prev = s;
    }
}

} // namespace

double vesselness_response(double l1, double l2, double l3, double alpha, double beta, double c) {
    if (!(l2 < 0.0 && l3 < 0.0)) return 0.0;
    const double rb2 = l1 * l1 / (l2 * l3);
    const double ra2 = (l2 * l2) / (l3 * l3);
    const double s2norm = l1 * l1 + l2 * l2 + l3 * l3;
    return std::exp(-rb2 / (2.0 * beta * beta)) *
           (1.0 - std::exp(-ra2 / (2.0 * alpha * alpha))) *
           (1.0 - std::exp(-s2norm / (2.0 * c * c)));
}

Volume vesselness(const Volume& v, const VesselnessParams& p, int threads) {
    if (!(p.alpha > 0.0)) fail(ErrorCode::BadParam, "alpha must be positive");
    if (!(p.beta > 0.0)) fail(ErrorCode::BadParam, "beta must be positive");
    if (p.c && !(*p.c > 0.0)) fail(ErrorCode::BadParam, "c must be positive");
    validate_scales(p.scales);

    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance + " | vesselness");
    // zero contrast means zero response; the ratio terms would otherwise
    // amplify kernel rounding noise to O(1)
    if (min_value(v) == max_value(v)) return out;
    for (double s : p.scales) {
        HessianField f = gaussian_hessian(v, s, threads);
        compute_eigenvalues(f, threads);
        const double s2 = s * s;

        double c = 0.0;
        if (p.c) {
            c = *p.c;
        } else {
            double max_s2norm = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double l1 = f.l1.data[i] * s2;
                const double l2 = f.l2.data[i] * s2;
                const double l3 = f.l3.data[i] * s2;
                max_s2norm = std::max(max_s2norm, l1 * l1 + l2 * l2 + l3 * l3);
            }
            c = 0.5 * std::sqrt(max_s2norm);
        }
        if (!(c > 0.0)) continue; // no structure anywhere at this scale

        parallel_chunks(0, static_cast<std::int64_t>(out.size()), threads,
                        [&](std::int64_t b, std::int64_t e) {
                            for (std::int64_t i = b; i < e; ++i) {
                                const double val = vesselness_response(
                                    f.l1.data[i] * s2, f.l2.data[i] * s2, f.l3.data[i] * s2,
                                    p.alpha, p.beta, c);
                                const float fv = static_cast<float>(val);
                                if (fv > out.data[i]) out.data[i] = fv;
                            }
                        });
    }
    return out;
}

Volume neuriteness(const Volume& v, double s, double alpha, int threads, bool* degenerate) {
    if (!(s > 0.0) || !std::isfinite(s))
        fail(ErrorCode::BadSigma, "sigma must be positive and finite, got " + std::to_string(s));
    if (degenerate) *degenerate = false;

    if (min_value(v) == max_value(v)) {
        if (degenerate) *degenerate = true;
        return Volume(v.nx, v.ny, v.nz, 0.0f,
                      v.provenance + " | neuriteness (degenerate: no negative response)");
    }

    HessianField f = gaussian_hessian(v, s, threads);
    compute_eigenvalues(f, threads);

    Volume lmax(v.nx, v.ny, v.nz, 0.0f);
    parallel_chunks(0, static_cast<std::int64_t>(lmax.size()), threads,
                    [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t i = b; i < e; ++i) {
                            const double l1 = f.l1.data[i];
                            const double l2 = f.l2.data[i];
                            const double l3 = f.l3.data[i];
                            const double t = l1 + l2 + l3;
                            const double m1 = l1 + alpha * (t - l1);
                            const double m2 = l2 + alpha * (t - l2);
                            const double m3 = l3 + alpha * (t - l3);
                            // signed value of largest magnitude; ties pick the negative one
                            auto better = [](double cand, double cur) {
                                const double ac = std::abs(cand), au = std::abs(cur);
                                return ac != au ? ac > au : cand < cur;
                            };
                            double lm = m1;
                            if (better(m2, lm)) lm = m2;
                            if (better(m3, lm)) lm = m3;
                            lmax.data[i] = static_cast<float>(lm);
                        }
                    });

    float lmin = 0.0f;
    for (float x : lmax.data) lmin = std::min(lmin, x);

    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance + " | neuriteness");
    if (lmin >= 0.0f) {
        if (degenerate) *degenerate = true;
        out.provenance += " (degenerate: no negative response)";
        return out;
    }
    parallel_chunks(0, static_cast<std::int64_t>(out.size()), threads,
                    [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t i = b; i < e; ++i)
                            if (lmax.data[i] < 0.0f) out.data[i] = lmax.data[i] / lmin;
                    });
    return out;
}

double volume_ratio_response(double l2, double l_rho) {
    if (!(l2 > 0.0 && l_rho > 0.0)) return 0.0;
    if (l2 >= l_rho / 2.0) return 1.0;
    const double u = 3.0 / (l2 + l_rho);
    return l2 * l2 * (l_rho - l2) * u * u * u;
}

Volume volume_ratio(const Volume& v, const VolumeRatioParams& p, int threads) {
    if (!(p.tau > 0.0) || p.tau > 1.0)
        fail(ErrorCode::BadParam, "tau must lie in (0,1], got " + std::to_string(p.tau));
    validate_scales(p.scales);

    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance + " | volume_ratio");
    if (min_value(v) == max_value(v)) return out;
    for (double s : p.scales) {
        HessianField f = gaussian_hessian(v, s, threads);
        compute_eigenvalues(f, threads);
        const double s2 = s * s;

        // bright structures make the large eigenvalues negative; flip them
        double m = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            m = std::max(m, -static_cast<double>(f.l3.data[i]) * s2);
        const double thr = p.tau * m;

        parallel_chunks(0, static_cast<std::int64_t>(out.size()), threads,
                        [&](std::int64_t b, std::int64_t e) {
                            for (std::int64_t i = b; i < e; ++i) {
                                const double l2b = -static_cast<double>(f.l2.data[i]) * s2;
                                const double l3b = -static_cast<double>(f.l3.data[i]) * s2;
                                double lrho = 0.0;
                                if (l3b > thr) lrho = l3b;
                                else if (l3b > 0.0) lrho = thr;
                                const float fv = static_cast<float>(volume_ratio_response(l2b, lrho));
                                if (fv > out.data[i]) out.data[i] = fv;
                            }
                        });
    }
    return out;
}

} // namespace bh3d
