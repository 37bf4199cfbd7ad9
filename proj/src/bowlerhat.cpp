#include "bowlerhat3d/bowlerhat.hpp"
#include "bowlerhat3d/errors.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace bh3d {

namespace {

void validate(const BowlerHatParams& p) {
    if (p.d_max < 1 || p.d_max % 2 == 0)
        fail(ErrorCode::BadDiameter, "d_max must be odd and >= 1, got " + std::to_string(p.d_max));
    if (p.n_directions < 1)
        fail(ErrorCode::BadDirections,
             "n_directions must be >= 1, got " + std::to_string(p.n_directions));
}

// Distinct digitized lines only; duplicates cannot change the direction-wise max.
std::vector<StructuringElement> unique_line_ses(int d, const DirectionSet& dirs) {
    std::vector<StructuringElement> ses;
    std::set<std::vector<std::array<int, 3>>> seen;
    for (const auto& u : dirs.vectors) {
        StructuringElement se = make_line_se(d, u);
        if (seen.insert(se.offsets).second) ses.push_back(std::move(se));
    }
    return ses;
}

Volume line_max_opening(const Volume& v, int d, const DirectionSet& dirs, int threads) {
    const auto ses = unique_line_ses(d, dirs);
    Volume best = opening(v, ses[0], threads);
    for (std::size_t i = 1; i < ses.size(); ++i) {
        const Volume o = opening(v, ses[i], threads);
        for (std::size_t j = 0; j < best.size(); ++j)
            best.data[j] = std::max(best.data[j], o.data[j]);
    }
    best.provenance = v.provenance + " | line_max_opening d=" + std::to_string(d);
    return best;
}

} // namespace

std::vector<int> scale_list(const BowlerHatParams& p) {
    validate(p);
    std::vector<int> ds;
    for (int d = 1; d <= p.d_max; d += 2) ds.push_back(d);
    return ds;
}

ScaleBank sphere_bank(const Volume& v, const BowlerHatParams& p, int threads) {
    ScaleBank bank;
    bank.params = p;
    bank.diameters = scale_list(p);
    bank.volumes.reserve(bank.diameters.size());
    for (int d : bank.diameters) bank.volumes.push_back(opening(v, make_sphere_se(d), threads));
    return bank;
}

ScaleBank line_bank(const Volume& v, const BowlerHatParams& p, int threads) {
    ScaleBank bank;
    bank.params = p;
    bank.diameters = scale_list(p);
    bank.volumes.reserve(bank.diameters.size());
    const DirectionSet dirs = make_direction_set(p.n_directions);
    for (int d : bank.diameters) bank.volumes.push_back(line_max_opening(v, d, dirs, threads));
    return bank;
}

Volume bowler_hat(const Volume& v, const BowlerHatParams& p, int threads) {
    validate(p);
    const DirectionSet dirs = make_direction_set(p.n_directions);
    Volume out(v.nx, v.ny, v.nz, 0.0f, v.provenance + " | bowler_hat");
    for (int d : scale_list(p)) {
        if (d == 1) continue; // both openings are the identity at the unit scale
        const Volume sph = opening(v, make_sphere_se(d), threads);
        const Volume lin = line_max_opening(v, d, dirs, threads);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const float diff = lin.data[i] - sph.data[i];
            if (diff > out.data[i]) out.data[i] = diff;
        }
    }
    return out;
}

Volume bowler_hat_from_banks(const ScaleBank& spheres, const ScaleBank& lines) {
    if (spheres.diameters != lines.diameters)
        fail(ErrorCode::BankMismatch, "sphere and line banks cover different scale lists");
    if (spheres.volumes.size() != spheres.diameters.size() ||
        lines.volumes.size() != lines.diameters.size())
        fail(ErrorCode::BankMismatch, "bank volume count does not match its scale list");
    if (spheres.volumes.empty()) fail(ErrorCode::BankMismatch, "banks are empty");
    const Volume& ref = spheres.volumes[0];
    for (std::size_t i = 0; i < spheres.volumes.size(); ++i)
        if (!spheres.volumes[i].same_dims(ref) || !lines.volumes[i].same_dims(ref))
            fail(ErrorCode::BankMismatch, "bank entries disagree on volume dims");

    Volume out(ref.nx, ref.ny, ref.nz, 0.0f, "bank difference | bowler_hat");
    for (std::size_t s = 0; s < spheres.volumes.size(); ++s) {
        const Volume& sph = spheres.volumes[s];
        const Volume& lin = lines.volumes[s];
        for (std::size_t i = 0; i < out.size(); ++i) {
            const float diff = lin.data[i] - sph.data[i];
            if (diff > out.data[i]) out.data[i] = diff;
        }
    }
    return out;
}

} // namespace bh3d
