#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "mesh.hpp"
#include "quadrature.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Post-processing: element strains, L2 field differences, convergence
// rates, crack-tip tracking and damage-zone metrics.
//----------------------------------------------------------------------------

struct ElementStrain {
    double exx = 0.0, eyy = 0.0, exy = 0.0;
    double magnitude() const {
        return std::sqrt(exx * exx + eyy * eyy + 2.0 * exy * exy);
    }
};

// Linearized strain E = (grad u + grad u^T)/2, constant per linear element,
// evaluated from the element's shape-function gradients.
inline std::vector<ElementStrain> element_strain(const TriMesh& mesh,
                                                 const std::vector<double>& U) {
    const int32_t ne = mesh.num_elements();
    std::vector<ElementStrain> out(ne);
    for (int32_t e = 0; e < ne; ++e) {
        const auto nd = mesh.element(e);
        const Vec2 a = mesh.node(nd[0]), b = mesh.node(nd[1]), c = mesh.node(nd[2]);
        const double det = (b - a).cross(c - a);
        if (det == 0.0)
            throw std::invalid_argument("element_strain: degenerate element");
        // grad phi for the three vertices.
        const Vec2 g0{(b.y - c.y) / det, (c.x - b.x) / det};
        const Vec2 g1{(c.y - a.y) / det, (a.x - c.x) / det};
        const Vec2 g2{(a.y - b.y) / det, (b.x - a.x) / det};
        const Vec2 g[3] = {g0, g1, g2};
        double ux_x = 0.0, ux_y = 0.0, uy_x = 0.0, uy_y = 0.0;
        for (int v = 0; v < 3; ++v) {
            const double ux = U[2 * nd[v]], uy = U[2 * nd[v] + 1];
            ux_x += ux * g[v].x;
            ux_y += ux * g[v].y;
            uy_x += uy * g[v].x;
            uy_y += uy * g[v].y;
        }
        out[e] = {ux_x, uy_y, 0.5 * (ux_y + uy_x)};
    }
    return out;
}

struct L2DiffResult {
    double value = 0.0;
    int64_t excluded_points = 0; // quadrature points not located in the coarse mesh
};

// || u_coarse - u_fine ||_L2 integrated over the fine mesh; the coarse
// field is evaluated by point location + interpolation.
inline L2DiffResult l2_diff(const TriMesh& fine, const std::vector<double>& Uf,
                            const TriMesh& coarse, const std::vector<double>& Uc,
                            const QuadRule& rule = quad_midpoint3()) {
    if (static_cast<int32_t>(Uf.size()) != 2 * fine.num_nodes() ||
        static_cast<int32_t>(Uc.size()) != 2 * coarse.num_nodes())
        throw std::invalid_argument("l2_diff: field size mismatch");
    double acc = 0.0;
    int64_t excluded = 0;
    for (int32_t e = 0; e < fine.num_elements(); ++e) {
        for (const auto& [xq, wq] : fine.quadrature_points(e, rule)) {
            const auto ec = coarse.locate_point(xq);
            if (!ec) {
                ++excluded;
                continue;
            }
            const Vec2 uf = fine.interpolate(Uf, xq, e);
            const Vec2 uc = coarse.interpolate(Uc, xq, *ec);
            acc += wq * (uc - uf).norm2();
        }
    }
    return {std::sqrt(acc), excluded};
}

// alpha = (log e_coarse - log e_fine) / (log h_coarse - log h_fine);
// nullopt marks an undefined rate (zero error), which is not a fault.
inline std::optional<double> convergence_rate(double err_coarse, double err_fine,
                                              double h_coarse, double h_fine) {
    if (h_coarse <= h_fine || h_fine <= 0.0)
        throw std::invalid_argument("convergence_rate: need h_coarse > h_fine > 0");
    if (err_coarse < 0.0 || err_fine < 0.0)
        throw std::invalid_argument("convergence_rate: negative error");
    if (err_coarse == 0.0 || err_fine == 0.0) return std::nullopt;
    return (std::log(err_coarse) - std::log(err_fine)) /
           (std::log(h_coarse) - std::log(h_fine));
}

//----------------------------------------------------------------------------
// Crack tracking: the damaged set {Z >= threshold} is thresholded per
// snapshot, the connected component (over mesh edges) nearest the seed is
// taken, and the tip is its extremal node along the tracking axis.
//----------------------------------------------------------------------------

struct CrackAxis {
    Vec2 direction{0.0, 1.0}; // unit vector along expected growth
    Vec2 seed{};              // pre-crack tip or expected nucleation site
};

struct CrackTracePoint {
    double t = 0.0;
    Vec2 tip{};
    double length = 0.0;    // axis-projected extent of the damaged component
    double speed = 0.0;     // finite difference of tip coordinate
    double v_over_cR = 0.0;
    double t_bar = 0.0;     // (t - t1)/(t2 - t1), 0 when undefined
};

struct CrackTrace {
    std::vector<CrackTracePoint> points;
    double t1 = 0.0, t2 = 0.0; // first/last tip motion
};

namespace detail {

// Node adjacency (over shared elements) for connected components.
inline std::vector<std::vector<int32_t>> node_adjacency(const TriMesh& mesh) {
    std::vector<std::vector<int32_t>> adj(mesh.num_nodes());
    for (int32_t e = 0; e < mesh.num_elements(); ++e) {
        const auto nd = mesh.element(e);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a != b) adj[nd[a]].push_back(nd[b]);
    }
    for (auto& v : adj) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return adj;
}

inline std::vector<int32_t>
damaged_component(const TriMesh& mesh, const std::vector<double>& Z,
                  double threshold, const Vec2& seed,
                  const std::vector<std::vector<int32_t>>& adj) {
    // Nearest damaged node to the seed starts the flood fill.
    int32_t start = -1;
    double best = std::numeric_limits<double>::max();
    for (int32_t i = 0; i < mesh.num_nodes(); ++i)
        if (Z[i] >= threshold) {
            const double d = (mesh.node(i) - seed).norm2();
            if (d < best) {
                best = d;
                start = i;
            }
        }
    if (start < 0) return {};
    std::vector<int32_t> comp;
    std::vector<uint8_t> visited(mesh.num_nodes(), 0);
    std::queue<int32_t> q;
    q.push(start);
    visited[start] = 1;
    while (!q.empty()) {
        const int32_t i = q.front();
        q.pop();
        comp.push_back(i);
        for (const int32_t j : adj[i])
            if (!visited[j] && Z[j] >= threshold) {
                visited[j] = 1;
                q.push(j);
            }
    }
    return comp;
}

} // namespace detail

inline CrackTrace track_crack(const TriMesh& mesh,
                              const std::vector<double>& times,
                              const std::vector<std::vector<double>>& Z_snapshots,
                              const CrackAxis& axis, double c_R,
                              double threshold = 1.0,
                              double motion_floor = 0.0) {
    if (times.size() != Z_snapshots.size())
        throw std::invalid_argument("track_crack: times/snapshots mismatch");
    CrackTrace trace;
    if (times.empty()) return trace;

    const auto adj = detail::node_adjacency(mesh);
    const Vec2 dir = axis.direction * (1.0 / axis.direction.norm());

    double prev_coord = 0.0, prev_len = 0.0;
    bool have_prev = false;
    double first_coord = 0.0;
    std::vector<double> coords(times.size(),
                               std::numeric_limits<double>::quiet_NaN());

    for (size_t s = 0; s < times.size(); ++s) {
        const auto comp = detail::damaged_component(mesh, Z_snapshots[s],
                                                    threshold, axis.seed, adj);
        CrackTracePoint pt;
        pt.t = times[s];
        if (comp.empty()) {
            // No crack yet: report zero length, tip at the seed.
            pt.tip = axis.seed;
            pt.length = prev_len; // monotone by construction
            pt.speed = 0.0;
        } else {
            double cmin = std::numeric_limits<double>::max();
            double cmax = -cmin;
            Vec2 tip{};
            for (const int32_t i : comp) {
                const double c = mesh.node(i).dot(dir);
                cmin = std::min(cmin, c);
                if (c > cmax) {
                    cmax = c;
                    tip = mesh.node(i);
                }
            }
            pt.tip = tip;
            pt.length = std::max(prev_len, cmax - cmin);
            if (have_prev && times[s] > times[s - 1])
                pt.speed = std::max(0.0, (cmax - prev_coord) / (times[s] - times[s - 1]));
            coords[s] = cmax;
            if (!have_prev) first_coord = cmax;
            prev_coord = cmax;
            have_prev = true;
        }
        pt.v_over_cR = c_R > 0.0 ? pt.speed / c_R : 0.0;
        prev_len = pt.length;
        trace.points.push_back(pt);
    }

    // t1: first time the tip moved beyond motion_floor from its initial
    // position; t2: last time it moved between consecutive snapshots.
    bool found_t1 = false;
    for (size_t s = 0; s < times.size(); ++s) {
        if (std::isnan(coords[s])) continue;
        if (!found_t1 && std::abs(coords[s] - first_coord) > motion_floor) {
            trace.t1 = times[s];
            found_t1 = true;
        }
        if (s > 0 && !std::isnan(coords[s - 1]) && coords[s] != coords[s - 1])
            trace.t2 = times[s];
    }
    if (found_t1 && trace.t2 > trace.t1)
        for (auto& pt : trace.points)
            pt.t_bar = std::clamp((pt.t - trace.t1) / (trace.t2 - trace.t1), 0.0, 1.0);
    return trace;
}

// Maximal extent of {Z >= threshold} perpendicular to the crack axis,
// excluding nodes inside the given boxes (boundary-condition layers).
inline double damage_band_width(const TriMesh& mesh, const std::vector<double>& Z,
                                const CrackAxis& axis,
                                const std::vector<Box>& exclude = {},
                                double threshold = 1.0) {
    const Vec2 dir = axis.direction * (1.0 / axis.direction.norm());
    const Vec2 perp{-dir.y, dir.x};
    double lo = std::numeric_limits<double>::max(), hi = -lo;
    bool any = false;
    for (int32_t i = 0; i < mesh.num_nodes(); ++i) {
        if (Z[i] < threshold) continue;
        const Vec2 p = mesh.node(i);
        bool excluded = false;
        for (const auto& b : exclude)
            if (b.contains(p)) {
                excluded = true;
                break;
            }
        if (excluded) continue;
        const double c = p.dot(perp);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        any = true;
    }
    return any ? hi - lo : 0.0;
}

// Jaccard overlap |A and B| / |A or B| of two damaged node sets given as
// Z fields on the same mesh; 1.0 when both are empty.
inline double damaged_set_jaccard(const std::vector<double>& Za,
                                  const std::vector<double>& Zb,
                                  double threshold = 1.0) {
    if (Za.size() != Zb.size())
        throw std::invalid_argument("damaged_set_jaccard: size mismatch");
    int64_t in_both = 0, in_any = 0;
    for (size_t i = 0; i < Za.size(); ++i) {
        const bool a = Za[i] >= threshold, b = Zb[i] >= threshold;
        in_both += a && b;
        in_any += a || b;
    }
    return in_any == 0 ? 1.0 : static_cast<double>(in_both) / in_any;
}

} // namespace peri
