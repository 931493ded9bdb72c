#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fastmath.hpp"
#include "quadrature.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Constitutive data: influence function, RNP (regularized nonlinear) and
// PMB (prototype microelastic brittle) bond models, calibration from
// engineering constants, and elastic wave speeds. All value types.
//----------------------------------------------------------------------------

// Default influence function J(r) = 1 - r on [0,1), 0 beyond.
inline double influence_default(double r) {
    if (r < 0.0) throw std::invalid_argument("influence_default: negative r");
    return r >= 1.0 ? 0.0 : 1.0 - r;
}

// M_J = \int_0^1 J(r) r^2 dr via 64-point Gauss-Legendre.
inline double moment_MJ(const std::function<double(double)>& J) {
    std::vector<double> x, w;
    gauss_legendre_unit(64, x, w);
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * J(x[i]) * x[i] * x[i];
    return s;
}

struct RnpModel {
    double c = 0.0;      // potential scale
    double beta = 0.0;   // softening rate
    double r_star = 0.0; // inflection point of r -> psi(r^2), = 1/sqrt(2 beta)
    double horizon = 0.0;
    double rho = 0.0;
    double E = 0.0;
    double nu = 0.25;
    double Gc = 0.0;
    double MJ = 1.0 / 12.0;
    double force_prefactor = 4.0; // continuum bond-force factor; 1 mimics
                                  // summation codes that drop it
    static constexpr double wd = M_PI; // unit-ball volume, 2-D

    double psi(double r) const { return c * (1.0 - std::exp(-beta * r)); }
    double psi_prime(double r) const { return c * beta * exp_neg(beta * r); }

    // Critical strain for a bond of reference length L.
    double critical_strain(double L) const {
        if (L <= 0.0) throw std::invalid_argument("critical_strain: L <= 0");
        return r_star / std::sqrt(L);
    }
};

struct PmbModel {
    double c_pmb = 0.0; // bond stiffness (user supplied, not calibrated)
    double S_c = 0.0;   // constant critical strain
    double horizon = 0.0;
    double rho = 0.0;

    double critical_strain(double) const { return S_c; }
};

// Pairwise PMB force scalar for a bond with strain S; mu=0 once broken,
// irreversibly (the broken flag lives in the bond table).
inline double pmb_bond_scalar(const PmbModel& m, double S, bool broken) {
    return broken ? 0.0 : m.c_pmb * S;
}

inline RnpModel calibrate_rnp(double E, double Gc, double horizon, double rho,
                              const std::function<double(double)>& J = influence_default,
                              double force_prefactor = 4.0) {
    if (E <= 0.0 || Gc <= 0.0 || horizon <= 0.0 || rho <= 0.0)
        throw std::invalid_argument("calibrate_rnp: nonpositive input");
    RnpModel m;
    m.MJ = moment_MJ(J);
    m.c = Gc * M_PI / (4.0 * m.MJ);
    m.beta = 8.0 * E / (5.0 * m.c * m.MJ);
    m.r_star = 1.0 / std::sqrt(2.0 * m.beta);
    m.horizon = horizon;
    m.rho = rho;
    m.E = E;
    m.nu = 0.25; // bond-based 2-D plane strain; lambda = mu = 2E/5
    m.Gc = Gc;
    m.force_prefactor = force_prefactor;
    return m;
}

struct WaveSpeeds {
    double c_L = 0.0; // longitudinal
    double c_S = 0.0; // shear
    double c_R = 0.0; // Rayleigh (approximation)
};

inline WaveSpeeds wave_speeds(double E, double nu, double rho) {
    if (E <= 0.0 || rho <= 0.0 || nu < 0.0 || nu >= 0.5)
        throw std::invalid_argument("wave_speeds: invalid input");
    WaveSpeeds w;
    w.c_L = std::sqrt(E * (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu) * rho));
    w.c_S = std::sqrt(E / (2.0 * (1.0 + nu) * rho));
    w.c_R = w.c_S * (0.862 + 1.14 * nu) / (1.0 + nu);
    return w;
}

} // namespace peri
