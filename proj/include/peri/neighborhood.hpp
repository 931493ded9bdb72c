#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "geom.hpp"
#include "material.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace peri {

//----------------------------------------------------------------------------
// BondTable: CSR neighbor lists PD_i with quadrature-weighted volumes V_ij
// and per-bond broken flags. Rows are sorted by ascending neighbor id and
// summed in a fixed order, so results are independent of thread count.
//----------------------------------------------------------------------------

struct BondTable {
    std::vector<int64_t> offsets; // size num_nodes+1
    std::vector<int32_t> ids;     // neighbor j per bond
    std::vector<double> V;        // weighted volume per bond
    std::vector<uint8_t> broken;  // 1 = broken (irreversible)

    int32_t num_nodes() const { return static_cast<int32_t>(offsets.size()) - 1; }
    int64_t num_bonds() const { return static_cast<int64_t>(ids.size()); }

    int64_t row_begin(int32_t i) const { return offsets[i]; }
    int64_t row_end(int32_t i) const { return offsets[i + 1]; }

    // Sum of weighted volumes over PD_i (damage denominators etc.).
    double row_volume(int32_t i) const {
        double s = 0.0;
        for (int64_t k = row_begin(i); k < row_end(i); ++k) s += V[k];
        return s;
    }
};

namespace detail {

// Uniform background grid binning points, cell size >= epsilon so a disk
// query only touches the 3x3 cell block around its center.
struct CellGrid {
    double x0 = 0.0, y0 = 0.0, cell = 1.0;
    int nx = 1, ny = 1;
    std::vector<int32_t> cell_off;
    std::vector<int32_t> items;

    CellGrid(const std::vector<double>& pts_xy, const Box& box, double cell_size) {
        cell = cell_size;
        x0 = box.xmin;
        y0 = box.ymin;
        nx = std::max(1, static_cast<int>(std::floor(box.width() / cell)) + 1);
        ny = std::max(1, static_cast<int>(std::floor(box.height() / cell)) + 1);
        const auto n = static_cast<int32_t>(pts_xy.size() / 2);
        std::vector<int32_t> cidx(n);
        cell_off.assign(static_cast<size_t>(nx) * ny + 1, 0);
        for (int32_t p = 0; p < n; ++p) {
            cidx[p] = cell_of(pts_xy[2 * p], pts_xy[2 * p + 1]);
            ++cell_off[cidx[p] + 1];
        }
        for (size_t c = 1; c < cell_off.size(); ++c) cell_off[c] += cell_off[c - 1];
        items.resize(n);
        std::vector<int32_t> cur(cell_off.begin(), cell_off.end() - 1);
        for (int32_t p = 0; p < n; ++p) items[cur[cidx[p]]++] = p; // p ascending per cell
    }

    int32_t cell_of(double x, double y) const {
        int ix = static_cast<int>(std::floor((x - x0) / cell));
        int iy = static_cast<int>(std::floor((y - y0) / cell));
        ix = std::clamp(ix, 0, nx - 1);
        iy = std::clamp(iy, 0, ny - 1);
        return iy * nx + ix;
    }

    template <class F>
    void for_items_near(double x, double y, double radius, F&& fn) const {
        const int ix0 = std::clamp(static_cast<int>(std::floor((x - radius - x0) / cell)), 0, nx - 1);
        const int ix1 = std::clamp(static_cast<int>(std::floor((x + radius - x0) / cell)), 0, nx - 1);
        const int iy0 = std::clamp(static_cast<int>(std::floor((y - radius - y0) / cell)), 0, ny - 1);
        const int iy1 = std::clamp(static_cast<int>(std::floor((y + radius - y0) / cell)), 0, ny - 1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix) {
                const int32_t c = iy * nx + ix;
                for (int32_t k = cell_off[c]; k < cell_off[c + 1]; ++k) fn(items[k]);
            }
    }
};

} // namespace detail

//----------------------------------------------------------------------------
// NFEA neighbor build: j joins PD_i when some quadrature point of an
// element having j as vertex lies within the horizon of x_i;
// V_ij accumulates J^eps(|x_q-x_i|) phi_j(x_q) w_q over those points.
// A background cell grid prunes candidates; contributions are applied in
// ascending (element, point) order, which makes the result bit-identical
// to the literal all-pairs loop below.
//----------------------------------------------------------------------------
inline BondTable
build_neighbors(const TriMesh& mesh, double eps,
                const std::function<double(double)>& J = influence_default,
                const QuadRule& rule = quad_midpoint3()) {
    const int32_t n = mesh.num_nodes();
    const int32_t ne = mesh.num_elements();
    const int q_per_elem = static_cast<int>(rule.points.size());

    if (eps < 1e-12 * std::max(mesh.bounding_box().diameter(), 1e-300))
        throw std::invalid_argument("build_neighbors: horizon too small");
    if (mesh.structured() && eps < mesh.structured()->h)
        std::cerr << "build_neighbors: warning: horizon " << eps
                  << " below mesh size " << mesh.structured()->h
                  << " (under-resolved)\n";

    // Flatten quadrature points once: qid = e*Q + q.
    std::vector<double> qxy(static_cast<size_t>(ne) * q_per_elem * 2);
    std::vector<double> qw(static_cast<size_t>(ne) * q_per_elem);
    for (int32_t e = 0; e < ne; ++e) {
        const auto pts = mesh.quadrature_points(e, rule);
        for (int q = 0; q < q_per_elem; ++q) {
            qxy[2 * (static_cast<size_t>(e) * q_per_elem + q)] = pts[q].first.x;
            qxy[2 * (static_cast<size_t>(e) * q_per_elem + q) + 1] = pts[q].first.y;
            qw[static_cast<size_t>(e) * q_per_elem + q] = pts[q].second;
        }
    }

    detail::CellGrid grid(qxy, mesh.bounding_box(), eps);
    const double eps2 = eps * eps;
    const auto& tri = mesh.connectivity();

    std::vector<std::vector<int32_t>> row_ids(n);
    std::vector<std::vector<double>> row_V(n);

#pragma omp parallel
    {
        std::vector<int32_t> cand;
        std::vector<double> acc(n, 0.0);
        std::vector<uint8_t> seen(n, 0);
        std::vector<int32_t> touched;
#pragma omp for schedule(dynamic, 64)
        for (int32_t i = 0; i < n; ++i) {
            const Vec2 xi = mesh.node(i);
            cand.clear();
            grid.for_items_near(xi.x, xi.y, eps, [&](int32_t qid) {
                const double dx = qxy[2 * qid] - xi.x;
                const double dy = qxy[2 * qid + 1] - xi.y;
                if (dx * dx + dy * dy <= eps2) cand.push_back(qid);
            });
            // Ascending (element, point) order fixes the summation order.
            std::sort(cand.begin(), cand.end());

            touched.clear();
            for (const int32_t qid : cand) {
                const int32_t e = qid / q_per_elem;
                const int q = qid % q_per_elem;
                const double dx = qxy[2 * qid] - xi.x;
                const double dy = qxy[2 * qid + 1] - xi.y;
                const double dist = std::sqrt(dx * dx + dy * dy);
                const double jw = J(dist / eps) * qw[qid];
                for (int v = 0; v < 3; ++v) {
                    const int32_t j = tri[3 * e + v];
                    if (j == i) continue;
                    if (!seen[j]) {
                        seen[j] = 1;
                        touched.push_back(j);
                    }
                    acc[j] += jw * rule.points[q].bary[v];
                }
            }
            std::sort(touched.begin(), touched.end());
            row_ids[i].assign(touched.begin(), touched.end());
            row_V[i].reserve(touched.size());
            for (const int32_t j : touched) {
                row_V[i].push_back(acc[j]);
                acc[j] = 0.0;
                seen[j] = 0;
            }
        }
    }

    BondTable t;
    t.offsets.assign(n + 1, 0);
    for (int32_t i = 0; i < n; ++i)
        t.offsets[i + 1] = t.offsets[i] + static_cast<int64_t>(row_ids[i].size());
    t.ids.reserve(t.offsets[n]);
    t.V.reserve(t.offsets[n]);
    for (int32_t i = 0; i < n; ++i) {
        t.ids.insert(t.ids.end(), row_ids[i].begin(), row_ids[i].end());
        t.V.insert(t.V.end(), row_V[i].begin(), row_V[i].end());
    }
    t.broken.assign(t.offsets[n], 0);
    return t;
}

// Literal translation of the published per-node loop (quadratic in mesh
// size); retained as the correctness oracle for the accelerated build.
inline BondTable
build_neighbors_allpairs(const TriMesh& mesh, double eps,
                         const std::function<double(double)>& J = influence_default,
                         const QuadRule& rule = quad_midpoint3()) {
    const int32_t n = mesh.num_nodes();
    const int32_t ne = mesh.num_elements();
    const double eps2 = eps * eps;
    const auto& tri = mesh.connectivity();

    BondTable t;
    t.offsets.assign(n + 1, 0);
    std::vector<double> acc(n, 0.0);
    std::vector<uint8_t> seen(n, 0);
    std::vector<int32_t> touched;

    for (int32_t i = 0; i < n; ++i) {
        const Vec2 xi = mesh.node(i);
        touched.clear();
        for (int32_t e = 0; e < ne; ++e) {
            const auto pts = mesh.quadrature_points(e, rule);
            for (size_t q = 0; q < pts.size(); ++q) {
                const Vec2 d = pts[q].first - xi;
                if (d.norm2() > eps2) continue;
                const double jw = J(d.norm() / eps) * pts[q].second;
                for (int v = 0; v < 3; ++v) {
                    const int32_t j = tri[3 * e + v];
                    if (j == i) continue;
                    if (!seen[j]) {
                        seen[j] = 1;
                        touched.push_back(j);
                    }
                    acc[j] += jw * rule.points[q].bary[v];
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (const int32_t j : touched) {
            t.ids.push_back(j);
            t.V.push_back(acc[j]);
            acc[j] = 0.0;
            seen[j] = 0;
        }
        t.offsets[i + 1] = static_cast<int64_t>(t.ids.size());
    }
    t.broken.assign(t.ids.size(), 0);
    return t;
}

//----------------------------------------------------------------------------
// Meshfree discretization on a structured grid: every lattice node within
// the horizon is a neighbor with volume J(d/eps) h^2.
//----------------------------------------------------------------------------
inline BondTable
build_neighbors_meshfree(const TriMesh& mesh, double eps,
                         const std::function<double(double)>& J = influence_default) {
    const auto& s = mesh.structured();
    if (!s)
        throw std::invalid_argument("build_neighbors_meshfree: structured mesh required");
    const int np_x = s->nx + 1, np_y = s->ny + 1;
    const int32_t n = mesh.num_nodes();
    const double h = s->h;
    const double eps2 = eps * eps;
    const int reach = static_cast<int>(std::floor(eps / h)) + 1;
    const double cell_area = h * h;

    BondTable t;
    t.offsets.assign(n + 1, 0);
    for (int32_t i = 0; i < n; ++i) {
        const int ix = i % np_x, iy = i / np_x;
        const Vec2 xi = mesh.node(i);
        for (int jy = std::max(0, iy - reach); jy <= std::min(np_y - 1, iy + reach); ++jy)
            for (int jx = std::max(0, ix - reach); jx <= std::min(np_x - 1, ix + reach); ++jx) {
                const int32_t j = jy * np_x + jx;
                if (j == i) continue;
                const Vec2 d = mesh.node(j) - xi;
                const double d2 = d.norm2();
                if (d2 > eps2) continue;
                t.ids.push_back(j); // scan order is ascending j
                t.V.push_back(J(std::sqrt(d2) / eps) * cell_area);
            }
        t.offsets[i + 1] = static_cast<int64_t>(t.ids.size());
    }
    t.broken.assign(t.ids.size(), 0);
    return t;
}

//----------------------------------------------------------------------------
// Pre-cracks: break every bond whose open segment properly crosses a crack
// segment. Idempotent; flags are never cleared.
//----------------------------------------------------------------------------
struct CrackGeometry {
    std::vector<Segment> segments;
};

inline void apply_precrack(BondTable& table, const TriMesh& mesh,
                           const CrackGeometry& crack) {
    for (const auto& seg : crack.segments)
        if (seg.a.x == seg.b.x && seg.a.y == seg.b.y)
            throw std::invalid_argument("apply_precrack: zero-length crack segment");

    const int32_t n = table.num_nodes();
#pragma omp parallel for schedule(static)
    for (int32_t i = 0; i < n; ++i) {
        const Vec2 xi = mesh.node(i);
        for (int64_t k = table.row_begin(i); k < table.row_end(i); ++k) {
            if (table.broken[k]) continue;
            const Vec2 xj = mesh.node(table.ids[k]);
            for (const auto& seg : crack.segments)
                if (segments_intersect(xi, xj, seg.a, seg.b)) {
                    table.broken[k] = 1;
                    break;
                }
        }
    }
}

} // namespace peri
