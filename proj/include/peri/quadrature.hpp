#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace peri {

//----------------------------------------------------------------------------
// Quadrature rules on the reference triangle, stored as barycentric points
// with weights that are fractions of the element area (weights sum to 1).
//----------------------------------------------------------------------------

struct QuadPoint {
    std::array<double, 3> bary;
    double weight;
};

struct QuadRule {
    std::vector<QuadPoint> points;
    int degree = 0; // exact for polynomials up to this total degree
};

// Second-order rule: the three edge midpoints, equal weights.
inline const QuadRule& quad_midpoint3() {
    static const QuadRule rule{
        {{{0.5, 0.5, 0.0}, 1.0 / 3.0},
         {{0.0, 0.5, 0.5}, 1.0 / 3.0},
         {{0.5, 0.0, 0.5}, 1.0 / 3.0}},
        2};
    return rule;
}

// Radon's 7-point rule, exact to degree 5; used as a refinement oracle.
inline const QuadRule& quad_degree5_7pt() {
    static const QuadRule rule = [] {
        const double s15 = std::sqrt(15.0);
        const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
        const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
        QuadRule r;
        r.degree = 5;
        r.points = {
            {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
            {{a1, a1, 1.0 - 2.0 * a1}, w1},
            {{a1, 1.0 - 2.0 * a1, a1}, w1},
            {{1.0 - 2.0 * a1, a1, a1}, w1},
            {{a2, a2, 1.0 - 2.0 * a2}, w2},
            {{a2, 1.0 - 2.0 * a2, a2}, w2},
            {{1.0 - 2.0 * a2, a2, a2}, w2},
        };
        return r;
    }();
    return rule;
}

// Gauss-Legendre nodes/weights on [0,1], generated by Newton iteration on
// the Legendre recurrence; used for radial moment integrals.
inline void gauss_legendre_unit(int n, std::vector<double>& x,
                                std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        // Initial guess (Chebyshev) for the i-th root on [-1,1].
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 + t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp); // already scaled to [0,1]
    }
}

} // namespace peri
