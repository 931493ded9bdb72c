#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "force.hpp"
#include "integrator.hpp"
#include "material.hpp"
#include "mesh.hpp"
#include "neighborhood.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Time-loop driver: advances a prepared system, collecting field snapshots
// every dt_out and a scalar trace per snapshot.
//----------------------------------------------------------------------------

using MaterialModel = std::variant<RnpModel, PmbModel>;

inline double material_rho(const MaterialModel& m) {
    return std::visit([](const auto& mm) { return mm.rho; }, m);
}

struct RunInput {
    const TriMesh* mesh = nullptr;
    BondTable* table = nullptr; // mutated by PMB breaking
    MaterialModel model;
    std::vector<BoundaryCondition> bcs;
    BodyForce body;
    std::vector<double> u0, v0; // empty = zero
    double dt = 0.0;
    double t_F = 0.0;
    double dt_out = 0.0;
    bool keep_displacements = true; // retain U snapshots (rate studies)
    bool compute_damage = true;
    int progress_every = 0; // steps between progress lines; 0 = silent
};

struct Snapshot {
    int64_t step = 0;
    double t = 0.0;
    std::vector<double> U;   // empty unless keep_displacements
    std::vector<double> Z;   // empty unless compute_damage
    std::vector<double> phi; // empty unless compute_damage
};

struct RunSummary {
    double wall_seconds = 0.0;
    double max_Z = 0.0;
    double kinetic_energy = 0.0; // 0.5 rho sum |V_i|^2 a_i at t_F
    int64_t steps = 0;
    int64_t broken_bonds = 0;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    RunSummary summary;
    std::vector<double> final_U, final_V;
};

inline RunResult run_simulation(const RunInput& in, std::ostream* log = nullptr) {
    if (!in.mesh || !in.table) throw std::invalid_argument("run: missing mesh/table");
    if (!(in.dt > 0.0) || !(in.t_F > 0.0))
        throw std::invalid_argument("run: need dt > 0 and t_F > 0");
    const double dt_out = in.dt_out > 0.0 ? in.dt_out : in.t_F;
    if (in.dt > dt_out + 1e-15 * dt_out)
        throw std::invalid_argument("run: dt exceeds dt_out");

    const TriMesh& mesh = *in.mesh;
    BondTable& table = *in.table;
    const int32_t n = mesh.num_nodes();
    const double rho = material_rho(in.model);

    ForceFn force;
    if (std::holds_alternative<RnpModel>(in.model)) {
        const RnpModel& m = std::get<RnpModel>(in.model);
        force = [&mesh, &table, m](const std::vector<double>& U,
                                   std::vector<double>& F) {
            compute_force_rnp(mesh, table, m, U, F);
        };
    } else {
        const PmbModel& m = std::get<PmbModel>(in.model);
        force = [&mesh, &table, m](const std::vector<double>& U,
                                   std::vector<double>& F) {
            compute_force_pmb(mesh, table, m, U, F);
        };
    }

    const auto bcs = detail::bind_bcs(mesh, in.bcs);
    const double div_limit = 1e6 * std::max(mesh.bounding_box().diameter(), 1e-300);

    SimState s;
    s.dt = in.dt;
    s.U = in.u0.empty() ? std::vector<double>(2 * n, 0.0) : in.u0;
    s.V = in.v0.empty() ? std::vector<double>(2 * n, 0.0) : in.v0;
    s.F.assign(2 * n, 0.0);
    if (static_cast<int32_t>(s.U.size()) != 2 * n ||
        static_cast<int32_t>(s.V.size()) != 2 * n)
        throw std::invalid_argument("run: initial condition size mismatch");

    // Snapshot cadence: nearest integer step multiple, avoiding drift.
    const int64_t total_steps = static_cast<int64_t>(std::llround(in.t_F / in.dt));
    int64_t out_every = static_cast<int64_t>(std::llround(dt_out / in.dt));
    if (out_every < 1) out_every = 1;

    RunResult result;
    auto snap = [&](const SimState& st) {
        Snapshot sn;
        sn.step = st.k;
        sn.t = st.t;
        if (in.keep_displacements) sn.U = st.U;
        if (in.compute_damage) {
            std::visit(
                [&](const auto& m) {
                    sn.Z = damage_Z(mesh, table, m, st.U);
                    sn.phi = damage_phi(mesh, table, m, st.U);
                },
                in.model);
            for (const double z : sn.Z)
                result.summary.max_Z = std::max(result.summary.max_Z, z);
        }
        result.snapshots.push_back(std::move(sn));
    };

    int64_t progress_every = in.progress_every;
    if (progress_every <= 0 && log)
        progress_every = std::max<int64_t>(total_steps / 10, 1);

    const auto t_start = std::chrono::steady_clock::now();
    snap(s); // k = 0

    try {
        if (total_steps >= 1) {
            step_first(s, mesh, force, in.body, rho, bcs);
            if (out_every == 1) snap(s);
        }
        while (s.k < total_steps) {
            step(s, mesh, force, in.body, rho, bcs, div_limit);
            if (s.k % out_every == 0 || s.k == total_steps) snap(s);
            if (log && progress_every > 0 && s.k % progress_every == 0) {
                double maxv = 0.0;
                for (const double v : s.V) maxv = std::max(maxv, std::abs(v));
                *log << "step " << s.k << "  t=" << s.t << "  max|V|=" << maxv
                     << "  maxZ=" << result.summary.max_Z << "\n";
            }
        }
    } catch (...) {
        // Flush what we have before propagating (partial outputs contract).
        result.summary.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        throw;
    }

    result.summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    result.summary.steps = s.k;
    for (const uint8_t b : table.broken) result.summary.broken_bonds += b;

    const auto areas = mesh.node_areas();
    double ke = 0.0;
    for (int32_t i = 0; i < n; ++i)
        ke += 0.5 * rho * (s.V[2 * i] * s.V[2 * i] + s.V[2 * i + 1] * s.V[2 * i + 1]) *
              areas[i];
    result.summary.kinetic_energy = ke;
    result.final_U = std::move(s.U);
    result.final_V = std::move(s.V);
    return result;
}

} // namespace peri
