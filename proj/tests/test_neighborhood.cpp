// Neighbor tables: weighted volumes against the analytic annulus oracle,
// bit-identity of the accelerated build vs the literal all-pairs loop,
// meshfree lattice counts, reflection symmetry, horizon nesting, and
// pre-crack bond breaking.

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "peri/neighborhood.hpp"

using namespace peri;

namespace {

// Weighted neighborhood volume of an interior node: integral of
// J(|x|/eps) over the disk = 2 pi eps^2 (1/2 - 1/3) = pi eps^2 / 3.
double annulus_exact(double eps) { return M_PI * eps * eps / 3.0; }

bool is_interior(const Vec2& p, double side, double eps) {
    return p.x >= eps && p.x <= side - eps && p.y >= eps && p.y <= side - eps;
}

// Deterministically jittered square mesh (no structured metadata): forces
// the generic code paths and makes all-pairs comparisons meaningful.
TriMesh jittered_square(int n, double amp) {
    TriMesh base = build_uniform_square_mesh(1.0, 1.0 / n);
    std::vector<double> X = base.coords();
    const double h = 1.0 / n;
    for (int32_t i = 0; i < base.num_nodes(); ++i) {
        const Vec2 p = base.node(i);
        if (p.x <= 0.0 || p.x >= 1.0 || p.y <= 0.0 || p.y >= 1.0) continue;
        // Cheap integer hash for reproducible jitter in (-amp, amp)*h.
        const uint32_t k = static_cast<uint32_t>(i) * 2654435761u;
        X[2 * i] += amp * h * (((k & 0xffff) / 65535.0) - 0.5) * 2.0;
        X[2 * i + 1] += amp * h * ((((k >> 16) & 0xffff) / 65535.0) - 0.5) * 2.0;
    }
    return TriMesh(std::move(X), std::vector<int32_t>(base.connectivity()));
}

} // namespace

//----------------------------------------------------------------------------
// Weighted volume vs analytic oracle
//----------------------------------------------------------------------------

TEST(NeighborVolumes, InteriorSumMatchesAnnulusAtHorizonOverEight) {
    const double eps = 0.2, side = 1.0;
    TriMesh mesh = build_uniform_square_mesh(side, eps / 8);
    BondTable t = build_neighbors(mesh, eps);
    const double exact = annulus_exact(eps);
    int checked = 0;
    for (int32_t i = 0; i < mesh.num_nodes(); ++i) {
        if (!is_interior(mesh.node(i), side, eps)) continue;
        ++checked;
        EXPECT_NEAR(t.row_volume(i), exact, 0.02 * exact) << "node " << i;
    }
    EXPECT_GT(checked, 500);
}

TEST(NeighborVolumes, ErrorShrinksUnderRefinement) {
    // Frozen envelope from the analytic oracle: worst interior deviation
    // is about 5.2% at m=4, 1.4% at m=8, 0.64% at m=12 (membership
    // truncation dominates, so the decay is first order in h).
    const double eps = 0.2, side = 1.0;
    const double exact = annulus_exact(eps);
    std::vector<double> worst;
    for (const int m : {4, 8, 12}) {
        TriMesh mesh = build_uniform_square_mesh(side, eps / m);
        BondTable t = build_neighbors(mesh, eps);
        double w = 0.0;
        for (int32_t i = 0; i < mesh.num_nodes(); ++i)
            if (is_interior(mesh.node(i), side, eps))
                w = std::max(w, std::abs(t.row_volume(i) - exact) / exact);
        worst.push_back(w);
    }
    EXPECT_LT(worst[0], 0.06);
    EXPECT_LT(worst[1], 0.02);
    EXPECT_LT(worst[2], 0.008);
    EXPECT_LT(worst[1], 0.5 * worst[0]);
    EXPECT_LT(worst[2], 0.75 * worst[1]);
}

TEST(NeighborVolumes, NonNegativeAndZeroVolumeBondsAllowed) {
    const double eps = 0.2;
    TriMesh mesh = build_uniform_square_mesh(1.0, eps / 4);
    BondTable t = build_neighbors(mesh, eps);
    int64_t zero_bonds = 0;
    for (int64_t k = 0; k < t.num_bonds(); ++k) {
        EXPECT_GE(t.V[k], 0.0);
        zero_bonds += t.V[k] == 0.0;
    }
    // Membership is by quadrature point, so bonds with vanishing shape
    // contribution legitimately appear with V = 0.
    EXPECT_GT(zero_bonds, 0);
}

TEST(NeighborVolumes, RowsSortedUniqueNoSelf) {
    TriMesh mesh = jittered_square(10, 0.3);
    BondTable t = build_neighbors(mesh, 0.25);
    EXPECT_EQ(t.num_nodes(), mesh.num_nodes());
    for (int32_t i = 0; i < t.num_nodes(); ++i) {
        for (int64_t k = t.row_begin(i); k < t.row_end(i); ++k) {
            EXPECT_NE(t.ids[k], i);
            if (k > t.row_begin(i)) { EXPECT_LT(t.ids[k - 1], t.ids[k]); }
        }
    }
}

//----------------------------------------------------------------------------
// Accelerated build vs literal all-pairs loop: bit identical
//----------------------------------------------------------------------------

TEST(NeighborOracle, BitIdenticalToAllPairsJittered) {
    TriMesh mesh = jittered_square(20, 0.3); // 441 nodes
    for (const double eps : {0.12, 0.25}) {
        BondTable fast = build_neighbors(mesh, eps);
        BondTable slow = build_neighbors_allpairs(mesh, eps);
        ASSERT_EQ(fast.offsets, slow.offsets) << "eps=" << eps;
        ASSERT_EQ(fast.ids, slow.ids);
        // Same summation order => identical doubles, not merely close.
        ASSERT_EQ(fast.V, slow.V);
    }
}

TEST(NeighborOracle, BitIdenticalToAllPairsStructured) {
    TriMesh mesh = build_uniform_square_mesh(1.0, 1.0 / 16);
    BondTable fast = build_neighbors(mesh, 0.2);
    BondTable slow = build_neighbors_allpairs(mesh, 0.2);
    ASSERT_EQ(fast.offsets, slow.offsets);
    ASSERT_EQ(fast.ids, slow.ids);
    ASSERT_EQ(fast.V, slow.V);
}

TEST(NeighborOracle, SevenPointRuleAgreesToo) {
    TriMesh mesh = jittered_square(12, 0.25);
    BondTable fast = build_neighbors(mesh, 0.2, influence_default, quad_degree5_7pt());
    BondTable slow =
        build_neighbors_allpairs(mesh, 0.2, influence_default, quad_degree5_7pt());
    ASSERT_EQ(fast.ids, slow.ids);
    ASSERT_EQ(fast.V, slow.V);
}

//----------------------------------------------------------------------------
// Meshfree lattice neighborhoods
//----------------------------------------------------------------------------

TEST(Meshfree, LatticeCountAtTwoH) {
    // eps = 2h: the closed disk holds 12 lattice offsets (4 at distance h,
    // 4 at sqrt(2) h, 4 at 2h; the last enter with J(1) = 0). h = 1/8 keeps
    // every lattice coordinate and distance exact in binary, so the
    // boundary set 'd = eps' is included deterministically.
    const double h = 0.125, eps = 0.25;
    TriMesh mesh = build_uniform_square_mesh(1.0, h);
    BondTable t = build_neighbors_meshfree(mesh, eps);
    const int32_t i = mesh.locate_node_near({0.5, 0.5});
    EXPECT_EQ(t.row_end(i) - t.row_begin(i), 12);
    const double expect =
        h * h * (4.0 * influence_default(0.5) +
                 4.0 * influence_default(std::sqrt(2.0) / 2.0) + 4.0 * 0.0);
    EXPECT_NEAR(t.row_volume(i), expect, 1e-14);
}

TEST(Meshfree, ConvergesToAnnulusForLargeRatio) {
    const double eps = 0.25, side = 1.0;
    TriMesh mesh = build_uniform_square_mesh(side, eps / 16);
    BondTable t = build_neighbors_meshfree(mesh, eps);
    const double exact = annulus_exact(eps);
    const int32_t i = mesh.locate_node_near({0.5, 0.5});
    EXPECT_NEAR(t.row_volume(i), exact, 0.01 * exact);
}

TEST(Meshfree, RequiresStructuredMesh) {
    TriMesh mesh = jittered_square(8, 0.2);
    EXPECT_THROW(build_neighbors_meshfree(mesh, 0.25), std::invalid_argument);
}

//----------------------------------------------------------------------------
// Symmetry and nesting
//----------------------------------------------------------------------------

TEST(NeighborSymmetry, MirroredMeshKeepsVolumes) {
    // Reflecting every coordinate about x = side/2 mirrors each element in
    // place (same connectivity), so distances and shape values -- and with
    // them every V_ij -- are unchanged under the *identity* index map.
    const int n = 12;
    const double side = 1.0, eps = 0.2;
    TriMesh mesh = build_uniform_square_mesh(side, side / n);
    std::vector<double> Xr = mesh.coords();
    for (int32_t i = 0; i < mesh.num_nodes(); ++i) Xr[2 * i] = side - Xr[2 * i];
    TriMesh mirror(std::move(Xr), std::vector<int32_t>(mesh.connectivity()));

    BondTable a = build_neighbors(mesh, eps);
    BondTable b = build_neighbors(mirror, eps);
    ASSERT_EQ(a.offsets, b.offsets);
    ASSERT_EQ(a.ids, b.ids);
    for (int64_t k = 0; k < a.num_bonds(); ++k)
        EXPECT_NEAR(a.V[k], b.V[k], 1e-13 * std::max(1.0, a.V[k])) << "bond " << k;
}

TEST(NeighborSymmetry, HalfTurnRotationMapsVolumes) {
    // (x, y) -> (side-x, side-y) maps the diagonal split onto itself, so a
    // single table must be symmetric under the induced node relabeling.
    // h = 1/8 keeps all coordinates binary-exact: quadrature points landing
    // exactly on the horizon circle then classify identically on both ends.
    const int n = 8;
    const double side = 1.0, eps = 0.25;
    TriMesh mesh = build_uniform_square_mesh(side, side / n);
    BondTable t = build_neighbors(mesh, eps);
    auto rot = [&](int32_t i) {
        const int np = n + 1;
        const int ix = i % np, iy = i / np;
        return (n - iy) * np + (n - ix);
    };
    for (int32_t i = 0; i < mesh.num_nodes(); ++i) {
        std::map<int32_t, double> row_i, row_r;
        for (int64_t k = t.row_begin(i); k < t.row_end(i); ++k)
            row_i[rot(t.ids[k])] = t.V[k];
        const int32_t ir = rot(i);
        for (int64_t k = t.row_begin(ir); k < t.row_end(ir); ++k)
            row_r[t.ids[k]] = t.V[k];
        ASSERT_EQ(row_i.size(), row_r.size()) << "node " << i;
        for (const auto& [j, v] : row_i) {
            ASSERT_TRUE(row_r.count(j)) << i << "->" << j;
            EXPECT_NEAR(row_r[j], v, 1e-13 * std::max(1.0, v));
        }
    }
}

TEST(NeighborNesting, SmallerHorizonIsSubset) {
    TriMesh mesh = jittered_square(14, 0.25);
    BondTable small = build_neighbors(mesh, 0.15);
    BondTable large = build_neighbors(mesh, 0.3);
    for (int32_t i = 0; i < mesh.num_nodes(); ++i) {
        std::set<int32_t> big(large.ids.begin() + large.row_begin(i),
                              large.ids.begin() + large.row_end(i));
        for (int64_t k = small.row_begin(i); k < small.row_end(i); ++k)
            EXPECT_TRUE(big.count(small.ids[k]))
                << "bond " << i << "->" << small.ids[k];
    }
}

//----------------------------------------------------------------------------
// Guard rails
//----------------------------------------------------------------------------

TEST(NeighborGuards, TinyHorizonThrows) {
    TriMesh mesh = build_uniform_square_mesh(1.0, 0.25);
    EXPECT_THROW(build_neighbors(mesh, 1e-15), std::invalid_argument);
}

TEST(NeighborGuards, UnderResolvedHorizonWarns) {
    TriMesh mesh = build_uniform_square_mesh(1.0, 0.25);
    testing::internal::CaptureStderr();
    BondTable t = build_neighbors(mesh, 0.2); // eps < h
    const std::string err = testing::internal::GetCapturedStderr();
    EXPECT_NE(err.find("under-resolved"), std::string::npos);
    EXPECT_EQ(t.num_nodes(), mesh.num_nodes());
}

//----------------------------------------------------------------------------
// Pre-cracks
//----------------------------------------------------------------------------

TEST(Precrack, BreaksCrossingBondsOnly) {
    const double h = 0.1;
    TriMesh mesh = build_uniform_square_mesh(1.0, h);
    BondTable t = build_neighbors(mesh, 2.5 * h);
    // Vertical crack through x = 0.45 (off the lattice), y in [0.2, 0.8].
    const CrackGeometry crack{{{{0.45, 0.2}, {0.45, 0.8}}}};
    apply_precrack(t, mesh, crack);

    int64_t broken = 0;
    for (int32_t i = 0; i < t.num_nodes(); ++i) {
        const Vec2 xi = mesh.node(i);
        for (int64_t k = t.row_begin(i); k < t.row_end(i); ++k) {
            const Vec2 xj = mesh.node(t.ids[k]);
            const bool crosses =
                segments_intersect(xi, xj, {0.45, 0.2}, {0.45, 0.8});
            EXPECT_EQ(t.broken[k] != 0, crosses)
                << "(" << xi.x << "," << xi.y << ")->(" << xj.x << "," << xj.y << ")";
            broken += t.broken[k];
        }
    }
    EXPECT_GT(broken, 0);
    // A node whose whole neighborhood sits left of the crack line keeps
    // every bond.
    const int32_t far = mesh.locate_node_near({0.0, 1.0});
    EXPECT_GT(t.row_end(far), t.row_begin(far));
    for (int64_t k = t.row_begin(far); k < t.row_end(far); ++k)
        EXPECT_EQ(t.broken[k], 0);
}

TEST(Precrack, EndpointTouchSurvivesCollinearOverlapBreaks) {
    const double h = 0.25;
    TriMesh mesh = build_uniform_square_mesh(1.0, h);
    BondTable t = build_neighbors(mesh, 2.1 * h);
    // Crack lying exactly on the lattice line y = 0.5.
    apply_precrack(t, mesh, CrackGeometry{{{{0.25, 0.5}, {0.75, 0.5}}}});
    auto bond_state = [&](Vec2 pa, Vec2 pb) {
        const int32_t i = mesh.locate_node_near(pa);
        const int32_t j = mesh.locate_node_near(pb);
        for (int64_t k = t.row_begin(i); k < t.row_end(i); ++k)
            if (t.ids[k] == j) return static_cast<int>(t.broken[k]);
        return -1;
    };
    // Vertical bond crossing the crack line: broken.
    EXPECT_EQ(bond_state({0.5, 0.25}, {0.5, 0.75}), 1);
    // Horizontal bond lying on the crack line: collinear overlap, broken.
    EXPECT_EQ(bond_state({0.25, 0.5}, {0.5, 0.5}), 1);
    // Bond ending exactly on the crack line: touch, survives.
    EXPECT_EQ(bond_state({0.5, 0.25}, {0.5, 0.5}), 0);
    // Bond crossing the (open) extension beyond the crack tip: survives.
    EXPECT_EQ(bond_state({0.0, 0.25}, {0.0, 0.75}), 0);
}

TEST(Precrack, IdempotentAndGuarded) {
    TriMesh mesh = build_uniform_square_mesh(1.0, 0.2);
    BondTable t = build_neighbors(mesh, 0.45);
    const CrackGeometry crack{{{{0.5, 0.1}, {0.5, 0.9}}}};
    apply_precrack(t, mesh, crack);
    const std::vector<uint8_t> once = t.broken;
    apply_precrack(t, mesh, crack);
    EXPECT_EQ(t.broken, once);
    EXPECT_THROW(
        apply_precrack(t, mesh, CrackGeometry{{{{0.5, 0.5}, {0.5, 0.5}}}}),
        std::invalid_argument);
}
