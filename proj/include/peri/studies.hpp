#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "scenario.hpp"
#include "simulate.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Mesh-refinement rate study: run a ladder of mesh ratios m = horizon/h of
// one preset, measure the L2 displacement difference against the finest
// (reference) run at each shared output time, and report per-time rates for
// consecutive ladder pairs plus their medians.
//----------------------------------------------------------------------------

struct RatesRow {
    double t = 0.0;
    std::vector<double> errors;                // per ladder entry
    std::vector<std::optional<double>> rates;  // per consecutive pair
};

struct RatesResult {
    std::vector<int> ms;      // ladder (coarse to fine)
    int m_ref = 0;            // reference ratio
    std::vector<double> hs;   // ladder mesh sizes
    std::vector<RatesRow> rows;
    std::vector<std::optional<double>> median_rates; // per consecutive pair
};

namespace detail {
inline std::optional<double> median_opt(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
} // namespace detail

inline RatesResult rates_study(const std::string& preset_name,
                               const std::vector<int>& ms, int m_ref,
                               PresetScale base = {}, std::ostream* log = nullptr) {
    if (ms.size() < 2) throw std::invalid_argument("rates_study: need >= 2 ladder entries");
    for (size_t i = 0; i + 1 < ms.size(); ++i)
        if (ms[i] >= ms[i + 1])
            throw std::invalid_argument("rates_study: ladder must be increasing");
    if (m_ref <= ms.back())
        throw std::invalid_argument("rates_study: reference must be finer than ladder");

    auto run_one = [&](int m) {
        PresetScale sc = base;
        sc.m = m;
        Scenario s = preset(preset_name, sc);
        BuiltScenario b = build_scenario(s);
        RunInput in = make_run_input(b);
        in.keep_displacements = true;
        in.compute_damage = false;
        if (log) *log << "rates: m=" << m << " nodes=" << b.mesh.num_nodes()
                      << " bonds=" << b.table.num_bonds() << "\n";
        RunResult r = run_simulation(in, log);
        return std::make_pair(std::move(b), std::move(r));
    };

    std::vector<std::pair<BuiltScenario, RunResult>> ladder;
    for (int m : ms) ladder.push_back(run_one(m));
    auto ref = run_one(m_ref);

    RatesResult out;
    out.ms = ms;
    out.m_ref = m_ref;
    for (auto& lr : ladder) out.hs.push_back(lr.first.mesh.structured()->h);

    const auto& ref_snaps = ref.second.snapshots;
    const QuadRule rule = quad_midpoint3();
    for (size_t k = 0; k < ref_snaps.size(); ++k) {
        RatesRow row;
        row.t = ref_snaps[k].t;
        bool usable = true;
        for (auto& lr : ladder) {
            if (k >= lr.second.snapshots.size()) { usable = false; break; }
            row.errors.push_back(l2_diff(ref.first.mesh, ref_snaps[k].U, lr.first.mesh,
                                         lr.second.snapshots[k].U, rule)
                                     .value);
        }
        if (!usable) continue;
        for (size_t j = 0; j + 1 < ladder.size(); ++j)
            row.rates.push_back(convergence_rate(row.errors[j], row.errors[j + 1],
                                                 out.hs[j], out.hs[j + 1]));
        out.rows.push_back(std::move(row));
    }

    const size_t npairs = ms.size() - 1;
    for (size_t j = 0; j < npairs; ++j) {
        std::vector<double> vals;
        for (const auto& row : out.rows)
            if (row.t > 0.0 && row.rates[j]) vals.push_back(*row.rates[j]);
        out.median_rates.push_back(detail::median_opt(std::move(vals)));
    }
    return out;
}

//----------------------------------------------------------------------------
// Discretization comparison: run the same scenario with the mesh-based and
// the meshfree neighbor volumes on the identical node set and compare the
// damaged sets {Z >= threshold} snapshot by snapshot.
//----------------------------------------------------------------------------

struct CompareResult {
    std::vector<double> times;
    std::vector<double> jaccard;   // per shared snapshot
    double final_jaccard = 0.0;
    size_t damaged_nfea = 0, damaged_meshfree = 0; // final snapshot
};

inline CompareResult compare_discretizations(const Scenario& base,
                                             double threshold = 1.0,
                                             std::ostream* log = nullptr) {
    auto run_mode = [&](Scenario::Mode mode) {
        Scenario s = base;
        s.mode = mode;
        BuiltScenario b = build_scenario(s);
        if (log) *log << "compare: " << (mode == Scenario::Mode::Nfea ? "nfea" : "meshfree")
                      << " bonds=" << b.table.num_bonds() << "\n";
        RunInput in = make_run_input(b);
        in.keep_displacements = false;
        in.compute_damage = true;
        return run_simulation(in, log);
    };
    RunResult a = run_mode(Scenario::Mode::Nfea);
    RunResult b = run_mode(Scenario::Mode::Meshfree);

    CompareResult out;
    const size_t n = std::min(a.snapshots.size(), b.snapshots.size());
    for (size_t k = 0; k < n; ++k) {
        out.times.push_back(a.snapshots[k].t);
        out.jaccard.push_back(
            damaged_set_jaccard(a.snapshots[k].Z, b.snapshots[k].Z, threshold));
    }
    if (n > 0) {
        out.final_jaccard = out.jaccard.back();
        const auto& Za = a.snapshots[n - 1].Z;
        const auto& Zb = b.snapshots[n - 1].Z;
        for (double z : Za) out.damaged_nfea += z >= threshold;
        for (double z : Zb) out.damaged_meshfree += z >= threshold;
    }
    return out;
}

//----------------------------------------------------------------------------
// Damage localization: re-run the fixed-layer mode-I setup for a descending
// list of horizons (mesh ratio held fixed) and check that each smaller-
// horizon damage zone is contained in the larger-horizon zone dilated by
// the larger horizon.
//----------------------------------------------------------------------------

struct LocalizationEntry {
    double horizon = 0.0;
    double h = 0.0;
    size_t damaged = 0;      // nodes with Z >= threshold outside BC layers
    double band_width = 0.0; // perpendicular extent of the damaged set
};

struct LocalizationPair {
    double horizon_large = 0.0, horizon_small = 0.0;
    double containment = 1.0;
    bool both_empty = false;
};

struct LocalizationResult {
    std::vector<LocalizationEntry> entries;
    std::vector<LocalizationPair> pairs;
};

inline LocalizationResult localization_study(const std::vector<double>& horizons,
                                             PresetScale scale = {},
                                             double threshold = 1.0,
                                             std::ostream* log = nullptr) {
    if (horizons.size() < 2)
        throw std::invalid_argument("localization_study: need >= 2 horizons");
    for (size_t i = 0; i + 1 < horizons.size(); ++i)
        if (horizons[i] <= horizons[i + 1])
            throw std::invalid_argument("localization_study: horizons must descend");

    struct RunData {
        std::vector<Vec2> damaged_xy;
        LocalizationEntry entry;
    };
    std::vector<RunData> runs;
    for (double eps : horizons) {
        Scenario s = preset("mode1_fixed_layers", scale);
        s.material.horizon = eps;
        const double side = s.mesh.side;
        const int n = static_cast<int>(std::round(side / (eps / scale.m)));
        s.mesh.h = side / n;
        BuiltScenario b = build_scenario(s);
        if (log) *log << "localization: horizon=" << eps << " h=" << s.mesh.h
                      << " nodes=" << b.mesh.num_nodes()
                      << " bonds=" << b.table.num_bonds() << "\n";
        RunInput in = make_run_input(b);
        in.keep_displacements = false;
        in.compute_damage = true;
        RunResult r = run_simulation(in, log);

        std::vector<Box> excl;
        for (const auto& bc : s.bcs) excl.push_back(bc.region);
        const auto& Z = r.snapshots.back().Z;
        RunData rd;
        rd.entry.horizon = eps;
        rd.entry.h = s.mesh.h;
        const double tol = 1e-12 * b.mesh.bounding_box().diameter();
        for (int32_t i = 0; i < b.mesh.num_nodes(); ++i) {
            if (Z[i] < threshold) continue;
            bool excluded = false;
            for (const auto& box : excl)
                if (box.contains(b.mesh.node(i), tol)) { excluded = true; break; }
            if (!excluded) rd.damaged_xy.push_back(b.mesh.node(i));
        }
        rd.entry.damaged = rd.damaged_xy.size();
        rd.entry.band_width =
            damage_band_width(b.mesh, Z, *s.crack_axis, excl, threshold);
        runs.push_back(std::move(rd));
    }

    LocalizationResult out;
    for (auto& rd : runs) out.entries.push_back(rd.entry);
    for (size_t i = 0; i + 1 < runs.size(); ++i) {
        const auto& large = runs[i];
        const auto& small = runs[i + 1];
        LocalizationPair p;
        p.horizon_large = horizons[i];
        p.horizon_small = horizons[i + 1];
        if (small.damaged_xy.empty()) {
            p.both_empty = large.damaged_xy.empty();
            p.containment = 1.0; // empty set is trivially contained
        } else {
            const double r2 = horizons[i] * horizons[i];
            size_t inside = 0;
            for (const auto& xs : small.damaged_xy) {
                bool hit = false;
                for (const auto& xl : large.damaged_xy) {
                    const double dx = xs.x - xl.x, dy = xs.y - xl.y;
                    if (dx * dx + dy * dy <= r2) { hit = true; break; }
                }
                inside += hit;
            }
            p.containment = static_cast<double>(inside) / small.damaged_xy.size();
        }
        out.pairs.push_back(p);
    }
    return out;
}

} // namespace peri
