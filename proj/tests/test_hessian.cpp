#include <doctest.h>

#include "test_util.hpp"

#include <bowlerhat3d/errors.hpp>
#include <bowlerhat3d/hessian.hpp>
#include <bowlerhat3d/phantom.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using bh3d::Volume;

namespace {

Volume gaussian_blob(int n, double sigma0) {
    Volume v(n, n, n);
    const double c = (n - 1) / 2.0;
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                const double r2 = (x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c);
                v.at(x, y, z) = static_cast<float>(std::exp(-r2 / (2.0 * sigma0 * sigma0)));
            }
    return v;
}

struct Sym3 {
    double a11, a22, a33, a12, a13, a23;
    double trace() const { return a11 + a22 + a33; }
    double det() const {
        return a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
               a13 * (a12 * a23 - a22 * a13);
    }
};

// similarity transform by the reflection I - 2uu^T, orthogonal by construction
Sym3 conjugate_diag(double d1, double d2, double d3, std::array<double, 3> u) {
    const double norm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (double& x : u) x /= norm;
    double r[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = (i == j ? 1.0 : 0.0) - 2.0 * u[i] * u[j];
    const double d[3] = {d1, d2, d3};
    double m[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) m[i][j] += r[i][k] * d[k] * r[j][k];
    return {m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]};
}

} // namespace

TEST_CASE("eigenvalues of diagonal matrices come back magnitude-sorted") {
    auto w = bh3d::eig_sym3(1.0, -2.0, 3.0, 0.0, 0.0, 0.0);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-2.0));
    CHECK(w[2] == doctest::Approx(3.0));

    w = bh3d::eig_sym3(0.0, 0.0, -5.0, 0.0, 0.0, 0.0);
    CHECK(w[0] == doctest::Approx(0.0));
    CHECK(w[1] == doctest::Approx(0.0));
    CHECK(w[2] == doctest::Approx(-5.0));
}

TEST_CASE("repeated eigenvalues survive a change of basis") {
    Sym3 m = conjugate_diag(2.0, 2.0, 5.0, {1, 2, 3});
    auto w = bh3d::eig_sym3(m.a11, m.a22, m.a33, m.a12, m.a13, m.a23);
    CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(w[2] == doctest::Approx(5.0).epsilon(1e-9));

    m = conjugate_diag(3.0, 3.0, 3.0, {1, -1, 2});
    w = bh3d::eig_sym3(m.a11, m.a22, m.a33, m.a12, m.a13, m.a23);
    for (double x : w) CHECK(x == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("eigenvalues preserve trace and determinant on random matrices") {
    std::mt19937 gen(123);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Sym3 m{dist(gen), dist(gen), dist(gen), dist(gen), dist(gen), dist(gen)};
        auto w = bh3d::eig_sym3(m.a11, m.a22, m.a33, m.a12, m.a13, m.a23);
        CHECK(std::abs(w[0]) <= std::abs(w[1]) + 1e-15);
        CHECK(std::abs(w[1]) <= std::abs(w[2]) + 1e-15);
        const double tr = w[0] + w[1] + w[2];
        const double det = w[0] * w[1] * w[2];
        CHECK(std::abs(tr - m.trace()) <= 1e-9 * std::max(1.0, std::abs(m.trace())));
        CHECK(std::abs(det - m.det()) <= 1e-6 * std::max(1e-12, std::abs(m.det())));
    }
}

TEST_CASE("full decomposition reconstructs the matrix") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        Sym3 m{dist(gen), dist(gen), dist(gen), dist(gen), dist(gen), dist(gen)};
        auto full = bh3d::eig_sym3_full(m.a11, m.a22, m.a33, m.a12, m.a13, m.a23);
        const double a[3][3] = {{m.a11, m.a12, m.a13}, {m.a12, m.a22, m.a23}, {m.a13, m.a23, m.a33}};
        double frob = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) frob += a[i][j] * a[i][j];
        frob = std::sqrt(frob);
        for (int k = 0; k < 3; ++k) {
            const auto& q = full.vectors[k];
            double norm = 0.0, residual = 0.0;
            for (int i = 0; i < 3; ++i) {
                double aq = 0.0;
                for (int j = 0; j < 3; ++j) aq += a[i][j] * q[j];
                residual += (aq - full.values[k] * q[i]) * (aq - full.values[k] * q[i]);
                norm += q[i] * q[i];
            }
            CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-12);
            CHECK(std::sqrt(residual) <= 1e-10 * std::max(1.0, frob));
        }
    }
}

TEST_CASE("gaussian smoothing leaves constants alone") {
    Volume v(20, 18, 16, 3.25f);
    Volume s = bh3d::gaussian_smooth(v, 2.0);
    CHECK(max_abs_diff(s, v) < 1e-6f);
}

TEST_CASE("hessian of a constant volume vanishes") {
    Volume v(24, 24, 24, 9.0f);
    bh3d::HessianField f = bh3d::gaussian_hessian(v, 2.0);
    for (const Volume* c : {&f.h11, &f.h22, &f.h33, &f.h12, &f.h13, &f.h23}) {
        CHECK(std::abs(bh3d::min_value(*c)) < 1e-6f);
        CHECK(std::abs(bh3d::max_value(*c)) < 1e-6f);
    }
}

TEST_CASE("hessian rejects non-positive scales") {
    Volume v(8, 8, 8, 0.0f);
    CHECK_FAILS_WITH(BadSigma, bh3d::gaussian_hessian(v, 0.0));
    CHECK_FAILS_WITH(BadSigma, bh3d::gaussian_hessian(v, -1.5));
}

TEST_CASE("blob center curvature matches the closed form") {
    // smoothing a Gaussian of width s0 with a Gaussian of width s gives another
    // Gaussian of width w, so the center curvature is known exactly
    const double s0 = 6.0, s = 2.0;
    const int n = 49, c = 24;
    Volume v = gaussian_blob(n, s0);
    bh3d::HessianField f = bh3d::gaussian_hessian(v, s);

    const double w2 = s0 * s0 + s * s;
    const double amplitude = std::pow(s0 * s0 / w2, 1.5);
    const double expected = -amplitude / w2;
    CHECK(f.h11.at(c, c, c) == doctest::Approx(expected).epsilon(0.02));
    CHECK(f.h22.at(c, c, c) == doctest::Approx(expected).epsilon(0.02));
    CHECK(f.h33.at(c, c, c) == doctest::Approx(expected).epsilon(0.02));
    CHECK(std::abs(f.h12.at(c, c, c)) < 1e-9);
    CHECK(std::abs(f.h13.at(c, c, c)) < 1e-9);
    CHECK(std::abs(f.h23.at(c, c, c)) < 1e-9);
}

TEST_CASE("hessian components match finite differences of the smoothed volume") {
    // margin must clear the smoothing radius (10 at s=2) plus the stencil,
    // or the difference picks up boundary renormalization instead
    const int n = 88, margin = 12;
    const double s = 2.0;
    Volume v = gaussian_blob(n, 20.0);
    bh3d::HessianField f = bh3d::gaussian_hessian(v, s);
    Volume sm = bh3d::gaussian_smooth(v, s);

    auto check_component = [&](const Volume& comp, auto&& fd) {
        double max_diff = 0.0, max_mag = 0.0;
        for (int z = margin; z < n - margin; ++z)
            for (int y = margin; y < n - margin; ++y)
                for (int x = margin; x < n - margin; ++x) {
                    const double d = fd(x, y, z);
                    max_diff = std::max(max_diff, std::abs(comp.at(x, y, z) - d));
                    max_mag = std::max(max_mag, std::abs(static_cast<double>(comp.at(x, y, z))));
                }
        CHECK(max_diff <= 1e-3 * max_mag);
    };

    // fourth-order stencils keep the reference's own truncation error far
    // below the gate; what remains is float storage noise
    auto d2 = [](auto&& g) {
        return (-g(-2) + 16.0 * g(-1) - 30.0 * g(0) + 16.0 * g(1) - g(2)) / 12.0;
    };
    auto d1 = [](auto&& g) { return (g(-2) - 8.0 * g(-1) + 8.0 * g(1) - g(2)) / 12.0; };

    check_component(f.h11, [&](int x, int y, int z) {
        return d2([&](int k) { return static_cast<double>(sm.at(x + k, y, z)); });
    });
    check_component(f.h22, [&](int x, int y, int z) {
        return d2([&](int k) { return static_cast<double>(sm.at(x, y + k, z)); });
    });
    check_component(f.h33, [&](int x, int y, int z) {
        return d2([&](int k) { return static_cast<double>(sm.at(x, y, z + k)); });
    });
    check_component(f.h12, [&](int x, int y, int z) {
        return d1([&](int i) {
            return d1([&](int j) { return static_cast<double>(sm.at(x + i, y + j, z)); });
        });
    });
    check_component(f.h13, [&](int x, int y, int z) {
        return d1([&](int i) {
            return d1([&](int j) { return static_cast<double>(sm.at(x + i, y, z + j)); });
        });
    });
    check_component(f.h23, [&](int x, int y, int z) {
        return d1([&](int i) {
            return d1([&](int j) { return static_cast<double>(sm.at(x, y + i, z + j)); });
        });
    });
}

TEST_CASE("eigenvalues of a bright tube are two negatives and a near-zero") {
    bh3d::PhantomSpec spec;
    spec.dims = {32, 32, 32};
    spec.shapes.push_back(bh3d::TubeShape{{15.5, 15.5, 4.0}, {15.5, 15.5, 27.0}, 5});
    Volume v = bh3d::generate_phantom(spec).first;

    bh3d::HessianField f = bh3d::gaussian_hessian(v, 2.0);
    bh3d::compute_eigenvalues(f, 2);
    REQUIRE(f.has_eigenvalues);
    const std::size_t i = f.l1.index(15, 15, 16);
    CHECK(f.l2.data[i] < 0.0f);
    CHECK(f.l3.data[i] < 0.0f);
    CHECK(std::abs(f.l1.data[i]) < 0.2f * std::abs(f.l3.data[i]));
}

TEST_CASE("vesselness response follows the ratio formula") {
    const double alpha = 0.5, beta = 0.5, c = 10.0, h = 10.0;

    // second path: the same quantity assembled step by step
    const double plate_term = 1.0 - std::exp(-1.0 / (2.0 * alpha * alpha));
    const double noise_term = 1.0 - std::exp(-2.0 * h * h / (2.0 * c * c));
    CHECK(bh3d::vesselness_response(0.0, -h, -h, alpha, beta, c) ==
          doctest::Approx(plate_term * noise_term).epsilon(1e-12));

    SUBCASE("sign gate") {
        CHECK(bh3d::vesselness_response(0.0, h, -h, alpha, beta, c) == 0.0);
        CHECK(bh3d::vesselness_response(0.0, -h, h, alpha, beta, c) == 0.0);
        CHECK(bh3d::vesselness_response(0.0, 0.0, -h, alpha, beta, c) == 0.0);
        CHECK(bh3d::vesselness_response(0.0, 0.0, 0.0, alpha, beta, c) == 0.0);
    }
    SUBCASE("tubes beat blobs at matched magnitude") {
        const double tube = bh3d::vesselness_response(0.0, -h, -h, alpha, beta, h);
        const double blob = bh3d::vesselness_response(-h, -h, -h, alpha, beta, h);
        CHECK(tube >= 5.0 * blob);
    }
}

TEST_CASE("vesselness volume is zero on constants and bounded on tubes") {
    Volume flat(16, 16, 16, 5.0f);
    bh3d::VesselnessParams p;
    p.scales = {1.0, 2.0};
    Volume out = bh3d::vesselness(flat, p);
    CHECK(bh3d::max_value(out) == 0.0f);

    bh3d::PhantomSpec spec;
    spec.dims = {32, 32, 32};
    spec.shapes.push_back(bh3d::TubeShape{{15.5, 15.5, 4.0}, {15.5, 15.5, 27.0}, 5});
    Volume tube = bh3d::generate_phantom(spec).first;
    out = bh3d::vesselness(tube, p);
    CHECK(bh3d::min_value(out) >= 0.0f);
    CHECK(bh3d::max_value(out) <= 1.0f);
    CHECK(out.at(15, 15, 16) > 10.0f * out.at(3, 3, 16));
}

TEST_CASE("vesselness validates its parameters") {
    Volume v(8, 8, 8, 0.0f);
    bh3d::VesselnessParams p;
    p.alpha = 0.0;
    CHECK_FAILS_WITH(BadParam, bh3d::vesselness(v, p));
    p = {};
    p.beta = -1.0;
    CHECK_FAILS_WITH(BadParam, bh3d::vesselness(v, p));
    p = {};
    p.c = 0.0;
    CHECK_FAILS_WITH(BadParam, bh3d::vesselness(v, p));
    p = {};
    p.scales = {};
    CHECK_FAILS_WITH(BadScales, bh3d::vesselness(v, p));
    p.scales = {2.0, 1.0};
    CHECK_FAILS_WITH(BadScales, bh3d::vesselness(v, p));
    p.scales = {1.0, -2.0};
    CHECK_FAILS_WITH(BadScales, bh3d::vesselness(v, p));
}

TEST_CASE("neuriteness peaks at exactly one") {
    bh3d::PhantomSpec spec;
    spec.dims = {32, 32, 32};
    spec.shapes.push_back(bh3d::TubeShape{{15.5, 15.5, 4.0}, {15.5, 15.5, 27.0}, 5});
    Volume tube = bh3d::generate_phantom(spec).first;

    bool degenerate = true;
    Volume out = bh3d::neuriteness(tube, 2.0, -1.0 / 3.0, 1, &degenerate);
    CHECK_FALSE(degenerate);
    CHECK(bh3d::min_value(out) >= 0.0f);
    CHECK(bh3d::max_value(out) == 1.0f);
    CHECK(out.at(15, 15, 16) > out.at(3, 3, 16));
}

TEST_CASE("neuriteness flags volumes with no negative response") {
    Volume flat(12, 12, 12, 4.0f);
    bool degenerate = false;
    Volume out = bh3d::neuriteness(flat, 2.0, -1.0 / 3.0, 1, &degenerate);
    CHECK(degenerate);
    CHECK(bh3d::max_value(out) == 0.0f);
    CHECK_FAILS_WITH(BadSigma, bh3d::neuriteness(flat, 0.0, -1.0 / 3.0));
}

TEST_CASE("volume ratio response hits its anchor points") {
    CHECK(bh3d::volume_ratio_response(1.0, 3.0) == 0.84375);
    CHECK(bh3d::volume_ratio_response(1.5, 3.0) == 1.0);
    CHECK(bh3d::volume_ratio_response(2.9, 3.0) == 1.0);
    CHECK(bh3d::volume_ratio_response(0.0, 3.0) == 0.0);
    CHECK(bh3d::volume_ratio_response(-1.0, 3.0) == 0.0);
    CHECK(bh3d::volume_ratio_response(1.0, 0.0) == 0.0);
    CHECK(bh3d::volume_ratio_response(1.0, -2.0) == 0.0);
    // continuous ramp up to the plateau
    CHECK(bh3d::volume_ratio_response(1.4999, 3.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(bh3d::volume_ratio_response(0.1, 3.0) < 0.1);
}

TEST_CASE("volume ratio volume behaves on tubes and validates parameters") {
    bh3d::PhantomSpec spec;
    spec.dims = {32, 32, 32};
    spec.shapes.push_back(bh3d::TubeShape{{15.5, 15.5, 4.0}, {15.5, 15.5, 27.0}, 5});
    Volume tube = bh3d::generate_phantom(spec).first;

    bh3d::VolumeRatioParams p;
    p.scales = {1.0, 2.0};
    Volume out = bh3d::volume_ratio(tube, p);
    CHECK(bh3d::min_value(out) >= 0.0f);
    CHECK(bh3d::max_value(out) <= 1.0f);
    CHECK(out.at(15, 15, 16) > out.at(3, 3, 16));

    Volume flat(12, 12, 12, 2.0f);
    CHECK(bh3d::max_value(bh3d::volume_ratio(flat, p)) == 0.0f);

    p.tau = 0.0;
    CHECK_FAILS_WITH(BadParam, bh3d::volume_ratio(tube, p));
    p.tau = 1.5;
    CHECK_FAILS_WITH(BadParam, bh3d::volume_ratio(tube, p));
}

TEST_CASE("hessian filters do not depend on the thread count") {
    Volume v = random_volume(24, 20, 18, 77);
    bh3d::HessianField f1 = bh3d::gaussian_hessian(v, 1.5, 1);
    bh3d::HessianField f4 = bh3d::gaussian_hessian(v, 1.5, 4);
    CHECK(bit_equal(f1.h11, f4.h11));
    CHECK(bit_equal(f1.h23, f4.h23));

    bh3d::VesselnessParams p;
    p.scales = {1.0, 2.0};
    CHECK(bit_equal(bh3d::vesselness(v, p, 1), bh3d::vesselness(v, p, 3)));
    bh3d::VolumeRatioParams q;
    q.scales = {1.0, 2.0};
    CHECK(bit_equal(bh3d::volume_ratio(v, q, 1), bh3d::volume_ratio(v, q, 3)));
}
