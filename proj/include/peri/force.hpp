#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fastmath.hpp"
#include "material.hpp"
#include "mesh.hpp"
#include "neighborhood.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Nodal force density and damage fields. Displacements, velocities and
// forces are flat arrays of 2N doubles (x,y interleaved). Per-row sums run
// in ascending neighbor order, so values do not depend on thread count.
//----------------------------------------------------------------------------

inline double bond_strain(const Vec2& Ui, const Vec2& Uj, const Vec2& xi,
                          const Vec2& xj) {
    const Vec2 d = xj - xi;
    const double L2 = d.norm2();
    if (L2 == 0.0) throw std::invalid_argument("bond_strain: zero bond length");
    return (Uj - Ui).dot(d) / L2;
}

// RNP force density: F(x_i) = sum_j pref/(wd eps^3) psi'(L S^2) S e V_ij
// over unbroken bonds (2-D, omega == 1).
inline void compute_force_rnp(const TriMesh& mesh, const BondTable& table,
                              const RnpModel& model, const std::vector<double>& U,
                              std::vector<double>& F) {
    const int32_t n = mesh.num_nodes();
    if (table.num_nodes() != n || static_cast<int32_t>(U.size()) != 2 * n)
        throw std::invalid_argument("compute_force_rnp: size mismatch");
    F.assign(2 * n, 0.0);

    const double eps = model.horizon;
    const double K = model.force_prefactor * model.c * model.beta /
                     (RnpModel::wd * eps * eps * eps);
    const double beta = model.beta;
    const double* __restrict Xp = mesh.coords().data();
    const double* __restrict Up = U.data();
    const int32_t* __restrict ids = table.ids.data();
    const double* __restrict V = table.V.data();
    const uint8_t* __restrict brk = table.broken.data();

#pragma omp parallel for schedule(static)
    for (int32_t i = 0; i < n; ++i) {
        const double xi = Xp[2 * i], yi = Xp[2 * i + 1];
        const double ui = Up[2 * i], vi = Up[2 * i + 1];
        const int64_t a = table.offsets[i], b = table.offsets[i + 1];
        double fx = 0.0, fy = 0.0;
#pragma omp simd reduction(+ : fx, fy)
        for (int64_t k = a; k < b; ++k) {
            const int32_t j = ids[k];
            const double dx = Xp[2 * j] - xi, dy = Xp[2 * j + 1] - yi;
            const double L2 = dx * dx + dy * dy;
            const double rL2 = 1.0 / L2;
            const double L = std::sqrt(L2);
            const double du = Up[2 * j] - ui, dv = Up[2 * j + 1] - vi;
            const double S = (du * dx + dv * dy) * rL2;
            const double mu = static_cast<double>(1 - brk[k]);
            const double psip_scaled = exp_neg(beta * L * S * S);
            const double coef = K * mu * psip_scaled * S * V[k] * rL2 * L;
            fx += coef * dx;
            fy += coef * dy;
        }
        F[2 * i] = fx;
        F[2 * i + 1] = fy;
    }
}

// PMB force density with irreversible breaking: bonds at |S| >= S_c break
// before the sum; F(x_i) = sum_j c_pmb S mu e V_ij (influence inside V_ij).
inline void compute_force_pmb(const TriMesh& mesh, BondTable& table,
                              const PmbModel& model, const std::vector<double>& U,
                              std::vector<double>& F) {
    const int32_t n = mesh.num_nodes();
    if (table.num_nodes() != n || static_cast<int32_t>(U.size()) != 2 * n)
        throw std::invalid_argument("compute_force_pmb: size mismatch");
    F.assign(2 * n, 0.0);

    const double Sc = model.S_c;
    const double c = model.c_pmb;
    const double* __restrict Xp = mesh.coords().data();
    const double* __restrict Up = U.data();

#pragma omp parallel for schedule(static)
    for (int32_t i = 0; i < n; ++i) {
        const double xi = Xp[2 * i], yi = Xp[2 * i + 1];
        const double ui = Up[2 * i], vi = Up[2 * i + 1];
        double fx = 0.0, fy = 0.0;
        for (int64_t k = table.offsets[i]; k < table.offsets[i + 1]; ++k) {
            const int32_t j = table.ids[k];
            const double dx = Xp[2 * j] - xi, dy = Xp[2 * j + 1] - yi;
            const double L2 = dx * dx + dy * dy;
            const double du = Up[2 * j] - ui, dv = Up[2 * j + 1] - vi;
            const double S = (du * dx + dv * dy) / L2;
            if (std::abs(S) >= Sc) table.broken[k] = 1; // irreversible
            if (table.broken[k]) continue;
            const double coef = c * S * table.V[k] / std::sqrt(L2);
            fx += coef * dx;
            fy += coef * dy;
        }
        F[2 * i] = fx;
        F[2 * i + 1] = fy;
    }
}

// Z(x_i): max over unbroken bonds of |S| / S_c(L). Pre-broken bonds are
// excluded so a pre-crack does not saturate the field.
template <class Model>
inline std::vector<double> damage_Z(const TriMesh& mesh, const BondTable& table,
                                    const Model& model,
                                    const std::vector<double>& U) {
    const int32_t n = mesh.num_nodes();
    std::vector<double> Z(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int32_t i = 0; i < n; ++i) {
        const Vec2 xi = mesh.node(i);
        const Vec2 Ui{U[2 * i], U[2 * i + 1]};
        double zmax = 0.0;
        for (int64_t k = table.row_begin(i); k < table.row_end(i); ++k) {
            if (table.broken[k]) continue;
            const int32_t j = table.ids[k];
            const Vec2 xj = mesh.node(j);
            const Vec2 Uj{U[2 * j], U[2 * j + 1]};
            const Vec2 d = xj - xi;
            const double L = d.norm();
            const double S = (Uj - Ui).dot(d) / (L * L);
            const double z = std::abs(S) / model.critical_strain(L);
            if (z > zmax) zmax = z;
        }
        Z[i] = zmax;
    }
    return Z;
}

// phi(x_i): weighted-volume fraction of bonds that are broken or currently
// critically stretched; 1 means fully damaged (complement of the intact
// mu-average).
template <class Model>
inline std::vector<double> damage_phi(const TriMesh& mesh, const BondTable& table,
                                      const Model& model,
                                      const std::vector<double>& U) {
    const int32_t n = mesh.num_nodes();
    std::vector<double> phi(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int32_t i = 0; i < n; ++i) {
        const Vec2 xi = mesh.node(i);
        const Vec2 Ui{U[2 * i], U[2 * i + 1]};
        double vol = 0.0, broken_vol = 0.0;
        for (int64_t k = table.row_begin(i); k < table.row_end(i); ++k) {
            const int32_t j = table.ids[k];
            vol += table.V[k];
            if (table.broken[k]) {
                broken_vol += table.V[k];
                continue;
            }
            const Vec2 xj = mesh.node(j);
            const Vec2 Uj{U[2 * j], U[2 * j + 1]};
            const Vec2 d = xj - xi;
            const double L = d.norm();
            const double S = (Uj - Ui).dot(d) / (L * L);
            if (std::abs(S) >= model.critical_strain(L)) broken_vol += table.V[k];
        }
        phi[i] = vol > 0.0 ? broken_vol / vol : 0.0;
    }
    return phi;
}

} // namespace peri
