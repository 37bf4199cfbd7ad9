#include "bowlerhat3d/bowlerhat.hpp"
#include "bowlerhat3d/errors.hpp"
#include "bowlerhat3d/eval.hpp"
#include "bowlerhat3d/hessian.hpp"
#include "bowlerhat3d/morphology.hpp"
#include "bowlerhat3d/phantom.hpp"
#include "bowlerhat3d/volume.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::string join_args(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) {
        if (i) os << ' ';
        os << argv[i];
    }
    return os.str();
}

std::filesystem::path sibling(const std::filesystem::path& header, const std::string& suffix) {
    auto p = header;
    p.replace_filename(header.stem().string() + suffix);
    return p;
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const std::string& subcommand, const json& params,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                    const json& seeds, double duration_s) {
    json m;
    m["tool"] = "bowler3d";
    m["version"] = BH3D_VERSION;
    m["command"] = command;
    m["subcommand"] = subcommand;
    m["parameters"] = params;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["seeds"] = seeds;
    m["duration_seconds"] = duration_s;
    std::ofstream f(path);
    if (!f) bh3d::fail(bh3d::ErrorCode::Unwritable, "cannot write manifest: " + path.string());
    f << m.dump(2) << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) bh3d::fail(bh3d::ErrorCode::BadSpec, "cannot open spec file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct PhantomArgs {
    std::string spec_path, out_path;
    int threads = 1;
};

struct NoiseArgs {
    std::string in_path, out_path, model = "gaussian";
    double sigma = 0.0, rho = 0.0;
    std::uint64_t seed = 0;
};

struct EnhanceArgs {
    std::string in_path, out_path, method;
    int dmax = 15;
    int directions = 32;
    std::vector<double> scales = {1.0, 1.5, 2.0, 3.0, 4.0};
    double alpha = 0.0; // per-method default applied when the flag is absent
    double beta = 0.5;
    double tau = 0.5;
    double c = 0.0;
    bool alpha_given = false, c_given = false;
    int threads = 1;
};

struct EvalArgs {
    std::string mode = "roc";
    std::string scores_path, truth_path, out_path;
    std::vector<std::string> methods; // name=path entries for table mode
    int thresholds = 1024;
    std::vector<double> p0, p1;
    int samples = 101;
};

int run_phantom(const PhantomArgs& a, const std::string& command) {
    Timer timer;
    const bh3d::PhantomSpec spec = bh3d::parse_phantom_spec(read_file(a.spec_path));
    auto [vol, truth] = bh3d::generate_phantom(spec, a.threads);

    const std::filesystem::path out(a.out_path);
    const auto truth_path = sibling(out, "_truth.json");
    bh3d::save_volume(vol, out.string(), bh3d::Dtype::F32);
    bh3d::save_volume(truth, truth_path.string(), bh3d::Dtype::U8);

    json params = {{"spec", a.spec_path}, {"threads", a.threads}};
    write_manifest(sibling(out, "_manifest.json"), command, "phantom", params, {a.spec_path},
                   {out.string(), truth_path.string()}, json::array(), timer.seconds());
    return 0;
}

int run_noise(const NoiseArgs& a, const std::string& command) {
    Timer timer;
    bh3d::NoiseSpec spec;
    if (a.model == "gaussian") spec.model = bh3d::NoiseSpec::Model::Gaussian;
    else if (a.model == "speckle") spec.model = bh3d::NoiseSpec::Model::Speckle;
    else if (a.model == "saltpepper") spec.model = bh3d::NoiseSpec::Model::SaltPepper;
    else bh3d::fail(bh3d::ErrorCode::BadNoise, "unknown noise model '" + a.model + "'");
    spec.sigma = a.sigma;
    spec.rho = a.rho;
    spec.seed = a.seed;

    const bh3d::Volume in = bh3d::load_volume(a.in_path);
    const bh3d::Volume out = bh3d::add_noise(in, spec);
    bh3d::save_volume(out, a.out_path, bh3d::Dtype::F32);

    json params = {{"model", a.model}, {"sigma", a.sigma}, {"rho", a.rho}, {"seed", a.seed}};
    write_manifest(sibling(a.out_path, "_manifest.json"), command, "noise", params, {a.in_path},
                   {a.out_path}, json::array({a.seed}), timer.seconds());
    return 0;
}

int run_enhance(const EnhanceArgs& a, const std::string& command) {
    Timer timer;
    const bh3d::Volume in = bh3d::load_volume(a.in_path);
    bh3d::Volume out;

    if (a.method == "bowlerhat") {
        bh3d::BowlerHatParams p;
        p.d_max = a.dmax;
        p.n_directions = a.directions;
        out = bh3d::bowler_hat(in, p, a.threads);
    } else if (a.method == "vesselness") {
        bh3d::VesselnessParams p;
        p.alpha = a.alpha_given ? a.alpha : 0.5;
        p.beta = a.beta;
        if (a.c_given) p.c = a.c;
        p.scales = a.scales;
        out = bh3d::vesselness(in, p, a.threads);
    } else if (a.method == "neuriteness") {
        const double alpha = a.alpha_given ? a.alpha : -1.0 / 3.0;
        // single-scale measure; multiple scales combine by pointwise max
        for (std::size_t i = 0; i < a.scales.size(); ++i) {
            bh3d::Volume n = bh3d::neuriteness(in, a.scales[i], alpha, a.threads);
            if (i == 0) {
                out = std::move(n);
            } else {
                for (std::size_t j = 0; j < out.size(); ++j)
                    out.data[j] = std::max(out.data[j], n.data[j]);
            }
        }
        if (a.scales.empty())
            bh3d::fail(bh3d::ErrorCode::BadScales, "scale set must be non-empty");
    } else if (a.method == "volumeratio") {
        bh3d::VolumeRatioParams p;
        p.tau = a.tau;
        p.scales = a.scales;
        out = bh3d::volume_ratio(in, p, a.threads);
    } else {
        bh3d::fail(bh3d::ErrorCode::UnknownMethod, "unknown method '" + a.method + "'");
    }

    out = bh3d::normalize(out);
    bh3d::save_volume(out, a.out_path, bh3d::Dtype::F32);

    json params = {{"method", a.method},       {"dmax", a.dmax},   {"directions", a.directions},
                   {"scales", a.scales},       {"beta", a.beta},   {"tau", a.tau},
                   {"threads", a.threads}};
    if (a.alpha_given) params["alpha"] = a.alpha;
    if (a.c_given) params["c"] = a.c;
    write_manifest(sibling(a.out_path, "_manifest.json"), command, "enhance", params, {a.in_path},
                   {a.out_path}, json::array(), timer.seconds());
    return 0;
}

int run_eval(const EvalArgs& a, const std::string& command) {
    Timer timer;
    std::vector<std::string> inputs;

    if (a.mode == "roc") {
        if (a.scores_path.empty() || a.truth_path.empty())
            bh3d::fail(bh3d::ErrorCode::BadParam, "roc mode needs --scores and --truth");
        const bh3d::Volume scores = bh3d::load_volume(a.scores_path);
        const bh3d::Volume truth = bh3d::load_volume(a.truth_path);
        bh3d::write_roc_csv(bh3d::roc(scores, truth, a.thresholds), a.out_path);
        inputs = {a.scores_path, a.truth_path};
    } else if (a.mode == "table") {
        if (a.methods.empty() || a.truth_path.empty())
            bh3d::fail(bh3d::ErrorCode::BadParam, "table mode needs --method entries and --truth");
        const bh3d::Volume truth = bh3d::load_volume(a.truth_path);
        std::vector<bh3d::Volume> volumes;
        std::vector<std::pair<std::string, const bh3d::Volume*>> methods;
        volumes.reserve(a.methods.size());
        for (const auto& entry : a.methods) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size())
                bh3d::fail(bh3d::ErrorCode::BadParam,
                           "--method entries take the form name=path, got '" + entry + "'");
            volumes.push_back(bh3d::load_volume(entry.substr(eq + 1)));
            inputs.push_back(entry.substr(eq + 1));
        }
        for (std::size_t i = 0; i < a.methods.size(); ++i)
            methods.emplace_back(a.methods[i].substr(0, a.methods[i].find('=')), &volumes[i]);
        bh3d::write_auc_csv(bh3d::auc_table(methods, truth, a.thresholds), a.out_path);
        inputs.push_back(a.truth_path);
    } else if (a.mode == "profile") {
        if (a.scores_path.empty())
            bh3d::fail(bh3d::ErrorCode::BadParam, "profile mode needs --scores");
        if (a.p0.size() != 3 || a.p1.size() != 3)
            bh3d::fail(bh3d::ErrorCode::BadProfile, "--p0 and --p1 must be x,y,z triples");
        const bh3d::Volume scores = bh3d::load_volume(a.scores_path);
        const bh3d::Profile prof = bh3d::extract_profile(
            scores, {a.p0[0], a.p0[1], a.p0[2]}, {a.p1[0], a.p1[1], a.p1[2]}, a.samples);
        bh3d::write_profile_csv(prof, a.out_path);
        inputs = {a.scores_path};
    } else {
        bh3d::fail(bh3d::ErrorCode::BadParam, "unknown eval mode '" + a.mode + "'");
    }

    json params = {{"mode", a.mode}, {"thresholds", a.thresholds}, {"samples", a.samples}};
    write_manifest(sibling(a.out_path, "_manifest.json"), command, "eval", params, inputs,
                   {a.out_path}, json::array(), timer.seconds());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D tubular-structure enhancement toolkit"};
    app.require_subcommand(1);
    const std::string command = join_args(argc, argv);

    PhantomArgs pa;
    auto* phantom = app.add_subcommand("phantom", "Generate a synthetic volume + ground truth");
    phantom->add_option("spec", pa.spec_path, "Phantom spec JSON")->required();
    phantom->add_option("out", pa.out_path, "Output volume header path")->required();
    phantom->add_option("--threads", pa.threads, "Worker threads")->capture_default_str();

    NoiseArgs na;
    auto* noise = app.add_subcommand("noise", "Corrupt a volume with a seeded noise model");
    noise->add_option("in", na.in_path, "Input volume header")->required();
    noise->add_option("out", na.out_path, "Output volume header")->required();
    noise->add_option("--model", na.model, "gaussian | speckle | saltpepper")
        ->capture_default_str();
    noise->add_option("--sigma", na.sigma, "Noise level on the 0-255 scale")
        ->capture_default_str();
    noise->add_option("--rho", na.rho, "Salt-pepper density in [0,1]")->capture_default_str();
    noise->add_option("--seed", na.seed, "RNG seed")->capture_default_str();

    EnhanceArgs ea;
    auto* enhance = app.add_subcommand("enhance", "Run an enhancement method");
    enhance->add_option("in", ea.in_path, "Input volume header")->required();
    enhance->add_option("out", ea.out_path, "Output volume header (normalized)")->required();
    enhance->add_option("--method", ea.method, "bowlerhat | vesselness | neuriteness | volumeratio")
        ->required();
    enhance->add_option("--dmax", ea.dmax, "Largest structure diameter (odd)")
        ->capture_default_str();
    enhance->add_option("--directions", ea.directions, "Line directions per scale")
        ->capture_default_str();
    enhance->add_option("--scales", ea.scales, "Gaussian scales")
        ->delimiter(',')
        ->capture_default_str();
    auto* alpha_opt = enhance->add_option(
        "--alpha", ea.alpha, "Vesselness alpha (default 0.5) / neuriteness alpha (default -1/3)");
    enhance->add_option("--beta", ea.beta, "Vesselness beta")->capture_default_str();
    enhance->add_option("--tau", ea.tau, "Volume-ratio cut-off in (0,1]")->capture_default_str();
    auto* c_opt =
        enhance->add_option("--c", ea.c, "Vesselness c (default: half max Frobenius per scale)");
    enhance->add_option("--threads", ea.threads, "Worker threads")->capture_default_str();

    EvalArgs va;
    auto* eval = app.add_subcommand("eval", "Score volumes against ground truth");
    eval->add_option("--mode", va.mode, "roc | table | profile")->capture_default_str();
    eval->add_option("--scores", va.scores_path, "Scores volume header");
    eval->add_option("--truth", va.truth_path, "Binary ground-truth volume header");
    eval->add_option("--method", va.methods, "name=path entry for table mode (repeatable)");
    eval->add_option("--out", va.out_path, "Output CSV path")->required();
    eval->add_option("--thresholds", va.thresholds, "ROC threshold count")->capture_default_str();
    eval->add_option("--p0", va.p0, "Profile start x,y,z")->delimiter(',');
    eval->add_option("--p1", va.p1, "Profile end x,y,z")->delimiter(',');
    eval->add_option("--samples", va.samples, "Profile sample count")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    ea.alpha_given = alpha_opt->count() > 0;
    ea.c_given = c_opt->count() > 0;

    try {
        if (phantom->parsed()) return run_phantom(pa, command);
        if (noise->parsed()) return run_noise(na, command);
        if (enhance->parsed()) return run_enhance(ea, command);
        if (eval->parsed()) return run_eval(va, command);
    } catch (const bh3d::Error& e) {
        std::cerr << "error: " << bh3d::error_code_name(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: unexpected: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
