#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geom.hpp"
#include "mesh.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Explicit central-difference time integration with per-dof boundary
// conditions. Constrained dofs follow their prescribed displacement
// trajectory (velocity BCs are integrated in closed form); velocities are
// always the backward difference (U^{k+1}-U^k)/dt.
//----------------------------------------------------------------------------

enum class BcKind { FixedDisplacement, PrescribedDisplacement, PrescribedVelocity };

// Scalar time profiles used by displacement BCs and body forces.
enum class TimeProfile { Constant, LinearRamp, Sinusoid };

inline double eval_profile(TimeProfile p, double t, double frequency = 0.0) {
    switch (p) {
        case TimeProfile::Constant: return 1.0;
        case TimeProfile::LinearRamp: return t;
        case TimeProfile::Sinusoid: return std::sin(2.0 * M_PI * frequency * t);
    }
    return 0.0;
}

struct BoundaryCondition {
    std::string name;
    Box region;
    bool dof_x = false, dof_y = false;
    BcKind kind = BcKind::FixedDisplacement;
    Vec2 value{};              // displacement amplitude or velocity
    TimeProfile profile = TimeProfile::Constant;
    double frequency = 0.0;    // for Sinusoid

    // Prescribed displacement of a constrained dof at time t.
    Vec2 displacement_at(double t) const {
        switch (kind) {
            case BcKind::FixedDisplacement: return value;
            case BcKind::PrescribedDisplacement:
                return value * eval_profile(profile, t, frequency);
            case BcKind::PrescribedVelocity: return value * t;
        }
        return {};
    }
};

struct BodyForce {
    // b(x, t): force per unit volume; empty function means none.
    std::function<Vec2(const Vec2&, double)> b;
    explicit operator bool() const { return static_cast<bool>(b); }
};

struct SimState {
    std::vector<double> U, V, F; // 2N interleaved
    int64_t k = 0;
    double t = 0.0;
    double dt = 0.0;
};

namespace detail {

struct BcApplication {
    const BoundaryCondition* bc;
    std::vector<int32_t> nodes;
};

inline std::vector<BcApplication>
bind_bcs(const TriMesh& mesh, const std::vector<BoundaryCondition>& bcs) {
    std::vector<BcApplication> out;
    const double tol = 1e-12 * mesh.bounding_box().diameter();
    for (const auto& bc : bcs) {
        BcApplication app{&bc, {}};
        for (int32_t i = 0; i < mesh.num_nodes(); ++i)
            if (bc.region.contains(mesh.node(i), tol)) app.nodes.push_back(i);
        if (app.nodes.empty())
            throw std::invalid_argument("boundary condition '" + bc.name +
                                        "' selects no nodes");
        out.push_back(std::move(app));
    }
    return out;
}

inline void apply_bcs(std::vector<double>& U, const std::vector<BcApplication>& apps,
                      double t) {
    for (const auto& app : apps) {
        const Vec2 u = app.bc->displacement_at(t);
        for (const int32_t i : app.nodes) {
            if (app.bc->dof_x) U[2 * i] = u.x;
            if (app.bc->dof_y) U[2 * i + 1] = u.y;
        }
    }
}

inline void check_finite(const std::vector<double>& U, int64_t k, double limit) {
    for (size_t d = 0; d < U.size(); ++d)
        if (!std::isfinite(U[d]) || std::abs(U[d]) > limit)
            throw std::runtime_error(
                "integrator: divergence at step " + std::to_string(k) +
                ", node " + std::to_string(d / 2) +
                (std::isfinite(U[d]) ? " (displacement blow-up)" : " (non-finite)"));
}

} // namespace detail

using ForceFn = std::function<void(const std::vector<double>& U, std::vector<double>& F)>;

// First step: U^1 = u0 + dt v0 + (dt^2/2)(F(u0)+b)/rho on free dofs,
// prescribed trajectory on constrained dofs; then V^1 = (U^1-U^0)/dt.
inline void step_first(SimState& s, const TriMesh& mesh, const ForceFn& force,
                       const BodyForce& body, double rho,
                       const std::vector<detail::BcApplication>& bcs) {
    if (rho <= 0.0) throw std::invalid_argument("step_first: rho <= 0");
    if (s.k != 0) throw std::logic_error("step_first: state not at k=0");
    const int32_t n = mesh.num_nodes();
    const double dt = s.dt;

    force(s.U, s.F);
    std::vector<double> Unew(2 * n);
    for (int32_t i = 0; i < n; ++i) {
        Vec2 b{};
        if (body) b = body.b(mesh.node(i), 0.0);
        Unew[2 * i] = s.U[2 * i] + dt * s.V[2 * i] +
                      0.5 * dt * dt * (s.F[2 * i] + b.x) / rho;
        Unew[2 * i + 1] = s.U[2 * i + 1] + dt * s.V[2 * i + 1] +
                          0.5 * dt * dt * (s.F[2 * i + 1] + b.y) / rho;
    }
    detail::apply_bcs(Unew, bcs, dt);
    for (int32_t d = 0; d < 2 * n; ++d) s.V[d] = (Unew[d] - s.U[d]) / dt;
    s.U = std::move(Unew);
    s.k = 1;
    s.t = dt;
}

// Central-difference step: U^{k+1} = U^k + dt V^k + dt^2 (F+b)/rho on free
// dofs, boundary trajectory on constrained dofs; V^{k+1} = (U^{k+1}-U^k)/dt.
inline void step(SimState& s, const TriMesh& mesh, const ForceFn& force,
                 const BodyForce& body, double rho,
                 const std::vector<detail::BcApplication>& bcs,
                 double divergence_limit) {
    const int32_t n = mesh.num_nodes();
    const double dt = s.dt;
    const double t_next = (s.k + 1) * dt;

    force(s.U, s.F);
    std::vector<double> Unew(2 * n);
    if (body) {
        for (int32_t i = 0; i < n; ++i) {
            const Vec2 b = body.b(mesh.node(i), s.t);
            Unew[2 * i] = s.U[2 * i] + dt * s.V[2 * i] +
                          dt * dt * (s.F[2 * i] + b.x) / rho;
            Unew[2 * i + 1] = s.U[2 * i + 1] + dt * s.V[2 * i + 1] +
                              dt * dt * (s.F[2 * i + 1] + b.y) / rho;
        }
    } else {
        const double dt2_rho = dt * dt / rho;
#pragma omp parallel for schedule(static)
        for (int32_t d = 0; d < 2 * n; ++d)
            Unew[d] = s.U[d] + dt * s.V[d] + dt2_rho * s.F[d];
    }
    detail::apply_bcs(Unew, bcs, t_next);
    detail::check_finite(Unew, s.k + 1, divergence_limit);
#pragma omp parallel for schedule(static)
    for (int32_t d = 0; d < 2 * n; ++d) s.V[d] = (Unew[d] - s.U[d]) / dt;
    s.U = std::move(Unew);
    s.k += 1;
    s.t = t_next;
}

// Advisory stable time step: safety * h / c_L.
inline double stability_hint(double c_L, double h, double safety = 0.2) {
    if (c_L <= 0.0 || h <= 0.0)
        throw std::invalid_argument("stability_hint: nonpositive input");
    return safety * h / c_L;
}

} // namespace peri
