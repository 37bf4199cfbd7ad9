#include "bowlerhat3d/bowlerhat.hpp"
#include "bowlerhat3d/errors.hpp"
#include "bowlerhat3d/eval.hpp"
#include "bowlerhat3d/hessian.hpp"
#include "bowlerhat3d/morphology.hpp"
#include "bowlerhat3d/phantom.hpp"
#include "bowlerhat3d/volume.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// arrays are (nz, ny, nx), x fastest, matching the flat volume layout
bh3d::Volume to_volume(const FloatArray& arr) {
    if (arr.ndim() != 3) throw py::value_error("expected a 3D array (nz, ny, nx)");
    bh3d::Volume v(static_cast<int>(arr.shape(2)), static_cast<int>(arr.shape(1)),
                   static_cast<int>(arr.shape(0)));
    std::memcpy(v.data.data(), arr.data(), sizeof(float) * v.size());
    return v;
}

py::array_t<float> to_array(const bh3d::Volume& v) {
    py::array_t<float> arr({v.nz, v.ny, v.nx});
    std::memcpy(arr.mutable_data(), v.data.data(), sizeof(float) * v.size());
    return arr;
}

bh3d::StructuringElement make_se(const std::string& kind, int diameter,
                                 const std::optional<std::array<double, 3>>& axis) {
    if (kind == "sphere") return bh3d::make_sphere_se(diameter);
    if (kind == "line")
        return bh3d::make_line_se(diameter, axis.value_or(std::array<double, 3>{0.0, 0.0, 1.0}));
    throw py::value_error("kind must be 'sphere' or 'line'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "3D bowler-hat transform and Hessian-based baselines";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const bh3d::Error& e) {
            const std::string msg =
                std::string(bh3d::error_code_name(e.code())) + ": " + e.what();
            PyErr_SetString(PyExc_ValueError, msg.c_str());
        }
    });

    m.def(
        "normalize", [](const FloatArray& a) { return to_array(bh3d::normalize(to_volume(a))); },
        py::arg("volume"));

    const char* morph_names[] = {"erode", "dilate", "opening", "closing", "top_hat", "bottom_hat"};
    bh3d::Volume (*morph_fns[])(const bh3d::Volume&, const bh3d::StructuringElement&, int) = {
        bh3d::erode, bh3d::dilate, bh3d::opening, bh3d::closing, bh3d::top_hat, bh3d::bottom_hat};
    for (int i = 0; i < 6; ++i) {
        auto fn = morph_fns[i];
        m.def(
            morph_names[i],
            [fn](const FloatArray& a, const std::string& kind, int diameter,
                 std::optional<std::array<double, 3>> axis, int threads) {
                return to_array(fn(to_volume(a), make_se(kind, diameter, axis), threads));
            },
            py::arg("volume"), py::arg("kind"), py::arg("diameter"), py::arg("axis") = py::none(),
            py::arg("threads") = 1);
    }

    m.def(
        "direction_set",
        [](int n) {
            const bh3d::DirectionSet set = bh3d::make_direction_set(n);
            py::array_t<double> arr({n, 3});
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < 3; ++j) arr.mutable_at(i, j) = set.vectors[i][j];
            return arr;
        },
        py::arg("n"));

    m.def(
        "bowler_hat",
        [](const FloatArray& a, int d_max, int n_directions, int threads) {
            bh3d::BowlerHatParams p;
            p.d_max = d_max;
            p.n_directions = n_directions;
            return to_array(bh3d::bowler_hat(to_volume(a), p, threads));
        },
        py::arg("volume"), py::arg("d_max") = 15, py::arg("n_directions") = 32,
        py::arg("threads") = 1);

    m.def(
        "vesselness",
        [](const FloatArray& a, double alpha, double beta, std::optional<double> c,
           std::vector<double> scales, int threads) {
            bh3d::VesselnessParams p;
            p.alpha = alpha;
            p.beta = beta;
            p.c = c;
            p.scales = std::move(scales);
            return to_array(bh3d::vesselness(to_volume(a), p, threads));
        },
        py::arg("volume"), py::arg("alpha") = 0.5, py::arg("beta") = 0.5,
        py::arg("c") = py::none(), py::arg("scales") = std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0},
        py::arg("threads") = 1);

    m.def(
        "neuriteness",
        [](const FloatArray& a, double s, double alpha, int threads) {
            return to_array(bh3d::neuriteness(to_volume(a), s, alpha, threads));
        },
        py::arg("volume"), py::arg("s") = 2.0, py::arg("alpha") = -1.0 / 3.0,
        py::arg("threads") = 1);

    m.def(
        "volume_ratio",
        [](const FloatArray& a, double tau, std::vector<double> scales, int threads) {
            bh3d::VolumeRatioParams p;
            p.tau = tau;
            p.scales = std::move(scales);
            return to_array(bh3d::volume_ratio(to_volume(a), p, threads));
        },
        py::arg("volume"), py::arg("tau") = 0.5,
        py::arg("scales") = std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0}, py::arg("threads") = 1);

    m.def(
        "gaussian_smooth",
        [](const FloatArray& a, double s, int threads) {
            return to_array(bh3d::gaussian_smooth(to_volume(a), s, threads));
        },
        py::arg("volume"), py::arg("s"), py::arg("threads") = 1);

    m.def(
        "generate_phantom",
        [](const std::string& spec_json, int threads) {
            auto [vol, truth] = bh3d::generate_phantom(bh3d::parse_phantom_spec(spec_json), threads);
            return py::make_tuple(to_array(vol), to_array(truth));
        },
        py::arg("spec_json"), py::arg("threads") = 1);

    m.def(
        "add_noise",
        [](const FloatArray& a, const std::string& model, double sigma, double rho,
           std::uint64_t seed) {
            bh3d::NoiseSpec spec;
            if (model == "gaussian") spec.model = bh3d::NoiseSpec::Model::Gaussian;
            else if (model == "speckle") spec.model = bh3d::NoiseSpec::Model::Speckle;
            else if (model == "saltpepper") spec.model = bh3d::NoiseSpec::Model::SaltPepper;
            else throw py::value_error("model must be gaussian, speckle, or saltpepper");
            spec.sigma = sigma;
            spec.rho = rho;
            spec.seed = seed;
            return to_array(bh3d::add_noise(to_volume(a), spec));
        },
        py::arg("volume"), py::arg("model"), py::arg("sigma") = 0.0, py::arg("rho") = 0.0,
        py::arg("seed") = 0);

    m.def(
        "add_illumination_ramp",
        [](const FloatArray& a, std::array<double, 3> g, double amplitude) {
            return to_array(bh3d::add_illumination_ramp(to_volume(a), g, amplitude));
        },
        py::arg("volume"), py::arg("g"), py::arg("amplitude"));

    m.def(
        "auc",
        [](const FloatArray& scores, const FloatArray& truth, int thresholds) {
            return bh3d::roc(to_volume(scores), to_volume(truth), thresholds).auc;
        },
        py::arg("scores"), py::arg("truth"), py::arg("thresholds") = 1024);

    m.def(
        "roc_curve",
        [](const FloatArray& scores, const FloatArray& truth, int thresholds) {
            const bh3d::RocCurve c = bh3d::roc(to_volume(scores), to_volume(truth), thresholds);
            const auto n = static_cast<py::ssize_t>(c.thresholds.size());
            py::array_t<double> t(n), fpr(n), tpr(n);
            for (py::ssize_t i = 0; i < n; ++i) {
                t.mutable_at(i) = c.thresholds[i];
                fpr.mutable_at(i) = c.points[i][0];
                tpr.mutable_at(i) = c.points[i][1];
            }
            return py::make_tuple(t, fpr, tpr, c.auc);
        },
        py::arg("scores"), py::arg("truth"), py::arg("thresholds") = 1024);

    m.def(
        "psnr",
        [](const FloatArray& ref, const FloatArray& test, double peak) {
            return bh3d::psnr(to_volume(ref), to_volume(test), peak);
        },
        py::arg("reference"), py::arg("test"), py::arg("peak") = 255.0);

    m.def(
        "extract_profile",
        [](const FloatArray& a, std::array<double, 3> p0, std::array<double, 3> p1, int n) {
            const bh3d::Profile prof = bh3d::extract_profile(to_volume(a), p0, p1, n);
            const auto m_ = static_cast<py::ssize_t>(prof.positions.size());
            py::array_t<double> pos(m_), val(m_);
            for (py::ssize_t i = 0; i < m_; ++i) {
                pos.mutable_at(i) = prof.positions[i];
                val.mutable_at(i) = prof.values[i];
            }
            return py::make_tuple(pos, val);
        },
        py::arg("volume"), py::arg("p0"), py::arg("p1"), py::arg("n_samples") = 101);

    m.def(
        "fwhm",
        [](const std::vector<double>& positions, const std::vector<double>& values) {
            bh3d::Profile prof;
            prof.positions = positions;
            prof.values = values;
            return bh3d::fwhm(prof);
        },
        py::arg("positions"), py::arg("values"));

    m.def(
        "load_volume", [](const std::string& path) { return to_array(bh3d::load_volume(path)); },
        py::arg("path"));

    m.def(
        "save_volume",
        [](const FloatArray& a, const std::string& path, const std::string& dtype) {
            bh3d::save_volume(to_volume(a), path, bh3d::dtype_from_string(dtype));
        },
        py::arg("volume"), py::arg("path"), py::arg("dtype") = "f32");
}
