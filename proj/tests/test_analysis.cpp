// Post-processing: per-element strain on affine fields, L2 field
// differences against closed forms, convergence-rate arithmetic, and crack
// tracking / damage-zone metrics on synthetic damage fields with known
// front positions.

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "peri/analysis.hpp"
#include "peri/mesh.hpp"

using namespace peri;

namespace {

// Nodal sample of u(x) = (fx(x), fy(x)).
std::vector<double> sample_field(const TriMesh& mesh,
                                 const std::function<Vec2(const Vec2&)>& f) {
    std::vector<double> U(2 * mesh.num_nodes());
    for (int32_t i = 0; i < mesh.num_nodes(); ++i) {
        const Vec2 u = f(mesh.node(i));
        U[2 * i] = u.x;
        U[2 * i + 1] = u.y;
    }
    return U;
}

// Z field with value 1 where pred holds, 0 elsewhere.
std::vector<double> damaged_where(const TriMesh& mesh,
                                  const std::function<bool(const Vec2&)>& pred) {
    std::vector<double> Z(mesh.num_nodes(), 0.0);
    for (int32_t i = 0; i < mesh.num_nodes(); ++i)
        if (pred(mesh.node(i))) Z[i] = 1.0;
    return Z;
}

} // namespace

//----------------------------------------------------------------------------
// Element strain.
//----------------------------------------------------------------------------

TEST(ElementStrain, AffineFieldIsExactPerElement) {
    TriMesh mesh = build_uniform_square_mesh(1.0, 0.25);
    // u = A x + b with A = [[2, -1], [0.5, 3]].
    auto U = sample_field(mesh, [](const Vec2& p) {
        return Vec2{2.0 * p.x - 1.0 * p.y + 0.7, 0.5 * p.x + 3.0 * p.y - 0.2};
    });
    const auto E = element_strain(mesh, U);
    ASSERT_EQ(static_cast<int32_t>(E.size()), mesh.num_elements());
    for (const auto& e : E) {
        EXPECT_NEAR(e.exx, 2.0, 1e-12);
        EXPECT_NEAR(e.eyy, 3.0, 1e-12);
        EXPECT_NEAR(e.exy, 0.5 * (-1.0 + 0.5), 1e-12);
    }
    const double m = E[0].magnitude();
    EXPECT_NEAR(m, std::sqrt(4.0 + 9.0 + 2.0 * 0.0625), 1e-12);
}

TEST(ElementStrain, RigidTranslationAndSymmetry) {
    TriMesh mesh = build_uniform_square_mesh(1.0, 0.5);
    auto U = sample_field(mesh, [](const Vec2&) { return Vec2{0.3, -0.4}; });
    for (const auto& e : element_strain(mesh, U)) {
        EXPECT_DOUBLE_EQ(e.exx, 0.0);
        EXPECT_DOUBLE_EQ(e.eyy, 0.0);
        EXPECT_DOUBLE_EQ(e.exy, 0.0);
    }
    // Linearized rotation u = (-w y, w x) has zero symmetric strain.
    auto R = sample_field(mesh, [](const Vec2& p) {
        return Vec2{-0.01 * p.y, 0.01 * p.x};
    });
    for (const auto& e : element_strain(mesh, R)) {
        EXPECT_NEAR(e.exx, 0.0, 1e-15);
        EXPECT_NEAR(e.eyy, 0.0, 1e-15);
        EXPECT_NEAR(e.exy, 0.0, 1e-15);
    }
}

//----------------------------------------------------------------------------
// L2 differences.
//----------------------------------------------------------------------------

TEST(L2Diff, ConstantOffsetGivesNormTimesSqrtArea) {
    TriMesh mesh = build_uniform_square_mesh(1.0, 0.125);
    std::vector<double> Uf(2 * mesh.num_nodes(), 0.0);
    auto Uc = sample_field(mesh, [](const Vec2&) { return Vec2{0.3, 0.4}; });
    const auto r = l2_diff(mesh, Uf, mesh, Uc);
    EXPECT_EQ(r.excluded_points, 0);
    EXPECT_NEAR(r.value, 0.5, 1e-13); // |c| sqrt(area) = 0.5 * 1
}

TEST(L2Diff, LinearFieldInterpolatesExactlyAcrossResolutions) {
    TriMesh fine = build_uniform_square_mesh(1.0, 1.0 / 16);
    TriMesh coarse = build_uniform_square_mesh(1.0, 1.0 / 4);
    auto f = [](const Vec2& p) { return Vec2{2.0 * p.x - 3.0 * p.y, p.x + p.y}; };
    const auto r = l2_diff(fine, sample_field(fine, f), coarse, sample_field(coarse, f));
    EXPECT_EQ(r.excluded_points, 0);
    EXPECT_NEAR(r.value, 0.0, 1e-13);
}

TEST(L2Diff, QuadraticInterpolationErrorConvergesAtSecondOrder) {
    TriMesh fine = build_uniform_square_mesh(1.0, 1.0 / 32);
    auto f = [](const Vec2& p) { return Vec2{p.x * p.x, p.x * p.y}; };
    const auto Uf = sample_field(fine, f);

    auto coarse_err = [&](int n) {
        TriMesh coarse = build_uniform_square_mesh(1.0, 1.0 / n);
        return l2_diff(fine, Uf, coarse, sample_field(coarse, f)).value;
    };
    const double e4 = coarse_err(4), e8 = coarse_err(8);
    const auto rate = convergence_rate(e4, e8, 1.0 / 4, 1.0 / 8);
    ASSERT_TRUE(rate.has_value());
    EXPECT_NEAR(*rate, 2.0, 0.35);
}

TEST(L2Diff, PointsOutsideCoarseMeshAreCountedNotSummed) {
    TriMesh fine = build_uniform_square_mesh(1.0, 0.25);
    TriMesh half = build_uniform_square_mesh(0.5, 0.25);
    std::vector<double> Uf(2 * fine.num_nodes(), 0.0);
    std::vector<double> Uh(2 * half.num_nodes(), 0.0);
    const auto r = l2_diff(fine, Uf, half, Uh);
    EXPECT_GT(r.excluded_points, 0);
    EXPECT_DOUBLE_EQ(r.value, 0.0);

    std::vector<double> bad(3, 0.0);
    EXPECT_THROW(l2_diff(fine, bad, half, Uh), std::invalid_argument);
}

TEST(ConvergenceRate, PowersAndGuards) {
    // err = C h^2 exactly => rate 2.
    const auto r = convergence_rate(4e-3, 1e-3, 0.2, 0.1);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, 2.0, 1e-12);
    EXPECT_FALSE(convergence_rate(0.0, 1e-3, 0.2, 0.1).has_value());
    EXPECT_FALSE(convergence_rate(1e-3, 0.0, 0.2, 0.1).has_value());
    EXPECT_THROW(convergence_rate(1.0, 1.0, 0.1, 0.2), std::invalid_argument);
    EXPECT_THROW(convergence_rate(1.0, 1.0, 0.1, 0.1), std::invalid_argument);
    EXPECT_THROW(convergence_rate(-1.0, 1.0, 0.2, 0.1), std::invalid_argument);
}

//----------------------------------------------------------------------------
// Crack tracking on a synthetic advancing front.
//----------------------------------------------------------------------------

TEST(TrackCrack, SyntheticFrontAtConstantSpeed) {
    // Column x = 0.05 damages upward from y = 0.02 at 1000 m/s; the output
    // cadence is chosen so the front advances exactly one lattice spacing
    // (h = 0.005) per frame.
    TriMesh mesh = build_uniform_square_mesh(0.1, 0.005);
    const double v = 1000.0, y0 = 0.02, c_R = 3244.2;
    std::vector<double> times;
    std::vector<std::vector<double>> snaps;
    for (int s = 0; s < 4; ++s) {
        const double t = s * 5e-6;
        times.push_back(t);
        snaps.push_back(damaged_where(mesh, [&](const Vec2& p) {
            return std::abs(p.x - 0.05) < 1e-12 && p.y <= y0 + v * t + 1e-12;
        }));
    }
    CrackAxis axis{{0.0, 1.0}, {0.05, y0}};
    const CrackTrace trace = track_crack(mesh, times, snaps, axis, c_R);
    ASSERT_EQ(trace.points.size(), 4u);

    EXPECT_NEAR(trace.points[0].tip.y, y0, 1e-12);
    EXPECT_DOUBLE_EQ(trace.points[0].speed, 0.0); // no previous frame
    for (size_t s = 1; s < 4; ++s) {
        EXPECT_NEAR(trace.points[s].tip.y, y0 + v * times[s], 1e-9);
        EXPECT_NEAR(trace.points[s].speed, v, 1e-6);
        EXPECT_NEAR(trace.points[s].v_over_cR, v / c_R, 1e-9);
        EXPECT_GE(trace.points[s].length, trace.points[s - 1].length);
    }
    // Axis-projected extent grows with the front.
    EXPECT_NEAR(trace.points[3].length, y0 + v * times[3] - 0.0, 0.021);
    EXPECT_DOUBLE_EQ(trace.t1, times[1]);
    EXPECT_DOUBLE_EQ(trace.t2, times[3]);
    EXPECT_DOUBLE_EQ(trace.points[0].t_bar, 0.0);
    EXPECT_DOUBLE_EQ(trace.points[3].t_bar, 1.0);
    EXPECT_NEAR(trace.points[2].t_bar, 0.5, 1e-12);
}

TEST(TrackCrack, EmptyFramesAndDisconnectedBlobs) {
    TriMesh mesh = build_uniform_square_mesh(0.1, 0.005);
    CrackAxis axis{{0.0, 1.0}, {0.05, 0.02}};

    // Frame 0: nothing damaged. Frame 1: a near-seed column plus a far,
    // disconnected blob that must not be picked up by the component walk.
    std::vector<double> none(mesh.num_nodes(), 0.0);
    auto both = damaged_where(mesh, [](const Vec2& p) {
        const bool near_seed =
            std::abs(p.x - 0.05) < 1e-12 && p.y >= 0.015 && p.y <= 0.03;
        const bool far_blob = p.x <= 0.005 && p.y >= 0.095;
        return near_seed || far_blob;
    });
    const CrackTrace trace =
        track_crack(mesh, {0.0, 1e-6}, {none, both}, axis, 3244.2);

    EXPECT_NEAR(trace.points[0].tip.x, 0.05, 1e-12); // seed stands in
    EXPECT_DOUBLE_EQ(trace.points[0].length, 0.0);
    EXPECT_NEAR(trace.points[1].tip.y, 0.03, 1e-12); // far blob ignored
    EXPECT_NEAR(trace.points[1].length, 0.015, 1e-12);

    EXPECT_THROW(track_crack(mesh, {0.0}, {none, both}, axis, 3244.2),
                 std::invalid_argument);
}

TEST(TrackCrack, LengthIsMonotoneEvenIfFieldRecedes) {
    TriMesh mesh = build_uniform_square_mesh(0.1, 0.005);
    CrackAxis axis{{0.0, 1.0}, {0.05, 0.02}};
    auto tall = damaged_where(mesh, [](const Vec2& p) {
        return std::abs(p.x - 0.05) < 1e-12 && p.y >= 0.02 && p.y <= 0.05;
    });
    auto short_ = damaged_where(mesh, [](const Vec2& p) {
        return std::abs(p.x - 0.05) < 1e-12 && p.y >= 0.02 && p.y <= 0.03;
    });
    const CrackTrace trace =
        track_crack(mesh, {0.0, 1e-6}, {tall, short_}, axis, 3244.2);
    EXPECT_NEAR(trace.points[0].length, 0.03, 1e-12);
    EXPECT_DOUBLE_EQ(trace.points[1].length, trace.points[0].length);
    EXPECT_DOUBLE_EQ(trace.points[1].speed, 0.0); // tip regression clamps to 0
}

//----------------------------------------------------------------------------
// Damage-zone metrics.
//----------------------------------------------------------------------------

TEST(DamageBand, WidthPerpendicularToAxisWithExclusions) {
    TriMesh mesh = build_uniform_square_mesh(0.1, 0.005);
    CrackAxis axis{{0.0, 1.0}, {0.05, 0.02}};
    auto Z = damaged_where(mesh, [](const Vec2& p) {
        return p.x >= 0.045 - 1e-12 && p.x <= 0.055 + 1e-12 && p.y >= 0.02 &&
               p.y <= 0.08;
    });
    EXPECT_NEAR(damage_band_width(mesh, Z, axis), 0.01, 1e-12);

    // Excluding the left half of the band narrows it.
    const Box left_half{0.0, 0.0475, 0.0, 0.1};
    EXPECT_NEAR(damage_band_width(mesh, Z, axis, {left_half}), 0.005, 1e-12);

    std::vector<double> clean(mesh.num_nodes(), 0.0);
    EXPECT_DOUBLE_EQ(damage_band_width(mesh, clean, axis), 0.0);
}

TEST(Jaccard, OverlapCountsAndEdgeCases) {
    std::vector<double> Za(10, 0.0), Zb(10, 0.0);
    for (int i = 0; i < 5; ++i) Za[i] = 1.0;  // {0..4}
    for (int i = 3; i < 8; ++i) Zb[i] = 1.0;  // {3..7}
    EXPECT_DOUBLE_EQ(damaged_set_jaccard(Za, Zb), 2.0 / 8.0);

    std::vector<double> empty(10, 0.0);
    EXPECT_DOUBLE_EQ(damaged_set_jaccard(empty, empty), 1.0);
    EXPECT_DOUBLE_EQ(damaged_set_jaccard(Za, empty), 0.0);

    // Threshold is respected.
    std::vector<double> half(10, 0.5);
    EXPECT_DOUBLE_EQ(damaged_set_jaccard(half, half, 0.4), 1.0);
    EXPECT_DOUBLE_EQ(damaged_set_jaccard(half, half, 0.6), 1.0); // both empty

    std::vector<double> bad(4, 0.0);
    EXPECT_THROW(damaged_set_jaccard(Za, bad), std::invalid_argument);
}
