// Pointwise geometry of a billiard table and one confocal caustic.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ellbill/conic_geometry.hpp"
#include "ellbill/errors.hpp"

namespace {

using namespace ellbill;
constexpr double pi = std::numbers::pi;

const BilliardTable circle{1.0, 1.0};
const BilliardTable t2{2.0, 1.0};
const BilliardTable t5{5.0, 1.0};

// Intersections of the caustic tangent at u with the billiard, solved as a
// quadratic along the tangent line: an oracle independent of the chord formulas.
std::pair<Vec2, Vec2> tangent_line_hits(const BilliardTable& t, double lambda, double u)
{
    const double ac = std::sqrt(t.a() * t.a() - lambda), bc = std::sqrt(t.b() * t.b() - lambda);
    const Vec2 q{ac * std::cos(u), bc * std::sin(u)};
    const Vec2 d{-ac * std::sin(u), bc * std::cos(u)};
    const double A = d.x() * d.x() / (t.a() * t.a()) + d.y() * d.y() / (t.b() * t.b());
    const double B = 2.0 * (q.x() * d.x() / (t.a() * t.a()) + q.y() * d.y() / (t.b() * t.b()));
    const double C = t.boundary_residual(q);
    const double s = std::sqrt(B * B - 4.0 * A * C);
    return {q + d * ((-B - s) / (2.0 * A)), q + d * ((-B + s) / (2.0 * A))};
}

double tangency_residual(const ConfocalPair& pair, const Vec2& p, double u)
{
    const CausticPoint c = pair.caustic_point(u);
    return p.x() * c.point.x() / pair.ac2() + p.y() * c.point.y() / pair.bc2() - 1.0;
}

TEST(BilliardTable, RejectsBadAxes)
{
    EXPECT_THROW(BilliardTable(1.0, 2.0), DomainError);
    EXPECT_THROW(BilliardTable(1.0, 0.0), DomainError);
    EXPECT_THROW(BilliardTable(std::nan(""), 1.0), DomainError);
}

TEST(CausticAxes, Examples)
{
    const CausticAxes c = caustic_axes(circle, {0.5});
    EXPECT_DOUBLE_EQ(c.a_c, std::sqrt(0.5));
    EXPECT_DOUBLE_EQ(c.b_c, std::sqrt(0.5));

    const CausticAxes e = caustic_axes(t2, {0.75});
    EXPECT_DOUBLE_EQ(e.a_c, std::sqrt(3.25));
    EXPECT_DOUBLE_EQ(e.b_c, 0.5);
    EXPECT_NEAR(e.a_c * e.a_c - e.b_c * e.b_c, 3.0, 1e-15);

    EXPECT_THROW(caustic_axes(t2, {1.0}), DomainError);
    EXPECT_THROW(caustic_axes(t2, {0.0}), DomainError);
    EXPECT_THROW(caustic_axes(t2, {-0.1}), DomainError);
}

TEST(Joachimsthal, Examples)
{
    EXPECT_DOUBLE_EQ(joachimsthal(t2, {0.25}), 0.25);
    EXPECT_DOUBLE_EQ(joachimsthal(circle, {0.75}), std::sqrt(3.0) / 2);
}

TEST(ChordEndpoints, CircleVerticalChord)
{
    const Chord ch = chord_endpoints(circle, {0.5}, 0.0);
    const double r = std::sqrt(0.5);
    EXPECT_NEAR(ch.p1.x(), r, 1e-15);
    EXPECT_NEAR(ch.p2.x(), r, 1e-15);
    EXPECT_NEAR(std::abs(ch.p1.y()), r, 1e-15);
    EXPECT_NEAR(ch.p1.y(), -ch.p2.y(), 1e-15);
}

TEST(ChordEndpoints, MatchTangentLineIntersection)
{
    const ConfocalPair pair(t2, {0.5});
    const double u = pi / 3;
    const Chord ch = pair.chord(u);
    const auto [h1, h2] = tangent_line_hits(t2, 0.5, u);
    const double direct = std::min((ch.p1 - h1).norm() + (ch.p2 - h2).norm(), (ch.p1 - h2).norm() + (ch.p2 - h1).norm());
    EXPECT_LT(direct, 1e-10);
    for (const Vec2& p : {ch.p1, ch.p2}) {
        EXPECT_NEAR(t2.boundary_residual(p), 0.0, 1e-10);
        EXPECT_NEAR(tangency_residual(pair, p, u), 0.0, 1e-10);
    }
}

TEST(ChordEndpoints, PeriodicInU)
{
    const Chord c0 = chord_endpoints(t2, {0.5}, 0.7);
    const Chord c1 = chord_endpoints(t2, {0.5}, 0.7 + 2 * pi);
    EXPECT_LT((c0.p1 - c1.p1).norm(), 1e-14);
    EXPECT_LT((c0.p2 - c1.p2).norm(), 1e-14);
}

TEST(ChordLength, CircleIsTwoSqrtLambda)
{
    for (double lambda : {0.1, 0.5, 0.9})
        for (double u : {0.0, 0.4, 2.0})
            EXPECT_NEAR(chord_length(circle, {lambda}, u), 2 * std::sqrt(lambda), 1e-14);
}

TEST(ChordLength, ClosedFormMatchesEndpointDistance)
{
    const Chord ch = chord_endpoints(t2, {0.5}, 0.0);
    EXPECT_NEAR(chord_length(t2, {0.5}, 0.0), (ch.p2 - ch.p1).norm(), 1e-13);
}

TEST(FocalDistances, Examples)
{
    const FocalDistances v = focal_distances(t2, {2.0, 0.0});
    EXPECT_NEAR(v.d1, 2 - std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(v.d2, 2 + std::sqrt(3.0), 1e-15);
    const FocalDistances c = focal_distances(t2, {0.0, 1.0});
    EXPECT_NEAR(c.d1, 2.0, 1e-15);
    EXPECT_NEAR(c.d2, 2.0, 1e-15);
    const FocalDistances o = focal_distances(circle, circle.point_at(1.3));
    EXPECT_NEAR(o.d1, 1.0, 1e-15);
    EXPECT_NEAR(o.d2, 1.0, 1e-15);
    EXPECT_THROW(focal_distances(t2, {1.0, 1.0}), DomainError);
}

TEST(FocalDistances, SumAndProductIdentities)
{
    for (double t = 0.0; t < 2 * pi; t += 0.37) {
        const Vec2 p = t5.point_at(t);
        const FocalDistances d = focal_distances(t5, p);
        EXPECT_NEAR(d.d1 + d.d2, 10.0, 1e-10);
        EXPECT_NEAR(d.d1 * d.d2, (p.x() * p.x() + 625.0 * p.y() * p.y()) / 25.0, 1e-10);
    }
}

TEST(InteriorCosine, CircleFamilies)
{
    for (double u : {0.0, 0.9, 4.0}) {
        EXPECT_NEAR(interior_cosine(circle, {0.5}, u), 0.0, 1e-14);
        EXPECT_NEAR(interior_cosine(circle, {0.75}, u), 0.5, 1e-14);
        EXPECT_NEAR(interior_cosine_rational(circle, {0.5}, u), 0.0, 1e-14);
    }
}

TEST(InteriorCosine, IdentityAndRationalFormMatchGeometry)
{
    const ConfocalPair pair(t2, {0.5});
    EXPECT_NEAR(pair.interior_cosine(1.0), pair.interior_cosine_identity(1.0), 1e-10);
    EXPECT_NEAR(pair.interior_cosine(1.0), interior_cosine_rational(t2, {0.5}, 1.0), 1e-10);

    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double u = 2 * pi * k / 1000.0;
        worst = std::max(worst, std::abs(interior_cosine_rational(t2, {0.3}, u) - interior_cosine(t2, {0.3}, u)));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(InteriorCosine, RationalFormEndpoints)
{
    const RationalCosine rc = rational_cosine(ConfocalPair(t5, {0.9}));
    EXPECT_NEAR(rc(0.0), rc.r1 / rc.r3 * (1 - rc.s1()) / (1 - rc.s2()), 1e-12);
    EXPECT_NEAR(rc(pi / 2), rc.r1 / rc.r3, 1e-12);
}

// The interior angle is measured between the rays to the neighbouring
// vertices, so the outer angle at the tangent intersection is its
// supplement's partner: on the circle both equal 2 lambda - 1.
TEST(OuterCosine, CircleFamilies)
{
    for (double u : {0.0, 1.1, 3.0}) {
        EXPECT_NEAR(outer_cosine(circle, {0.75}, u), 0.5, 1e-14);
        EXPECT_NEAR(outer_cosine(circle, {0.5}, u), 0.0, 1e-14);
    }
    EXPECT_TRUE(ConfocalPair(circle, {0.5}).ca_is_zero());
    EXPECT_EQ(ConfocalPair(circle, {0.75}).outer_sign(), 1);
    EXPECT_EQ(ConfocalPair(circle, {0.25}).outer_sign(), -1);
}

TEST(OuterCosine, ClosedFormMatchesNormals)
{
    const ConfocalPair pair(t5, {0.5});
    EXPECT_NEAR(pair.outer_cosine(0.7), pair.outer_cosine_closed_form(0.7), 1e-9);
    for (double lambda : {0.1, 0.5, 0.9, 0.99}) {
        const ConfocalPair p(t2, {lambda});
        for (double u = 0.0; u < 2 * pi; u += 0.1)
            EXPECT_NEAR(p.outer_cosine(u), p.outer_cosine_closed_form(u), 1e-12) << lambda << " " << u;
    }
}

TEST(OuterCosine, SignIsMinusSignOfCa)
{
    for (double lambda : {0.2, 0.79, 0.81, 0.95}) {
        const ConfocalPair pair(t2, {lambda});
        for (double u = 0.0; u < 2 * pi; u += 0.25)
            EXPECT_EQ(pair.outer_cosine(u) > 0.0 ? 1 : -1, pair.outer_sign()) << lambda;
    }
}

TEST(MeasureDensity, Examples)
{
    for (double lambda : {0.2, 0.5})
        EXPECT_NEAR(measure_density(circle, {lambda}, 0.3), std::pow(1 - lambda, 1.0 / 6), 1e-15);
    // a_c^2 = 3.5, b_c^2 = 0.5, and a_c^2 - c^2 = 0.5 at u = 0.
    EXPECT_NEAR(measure_density(t2, {0.5}, 0.0), std::cbrt(3.5) * std::cbrt(0.5) / std::sqrt(0.5), 1e-15);
}

TEST(Curvature23, Examples)
{
    EXPECT_NEAR(curvature23(circle, circle.point_at(0.4)), 1.0, 1e-15);
    EXPECT_NEAR(curvature23(t2, {2.0, 0.0}), std::pow(2.0, 2.0 / 3), 1e-14);
    EXPECT_NEAR(curvature23(t2, {0.0, 1.0}), std::pow(4.0, -2.0 / 3), 1e-15);
    EXPECT_THROW(curvature23(t2, {1.0, 1.0}), DomainError);
}

TEST(Curvature23, LinearInVertexCosine)
{
    const ConfocalPair pair(t2, {0.5});
    for (double u = 0.0; u < 2 * pi; u += 0.3) {
        const Chord ch = pair.chord(u);
        const double cos_p1 = vertex_angle_cosine(ch.p2, ch.p1, pair.chord(pair.next_tangency(u)).p1);
        EXPECT_NEAR(curvature23(t2, ch.p1), curvature23_from_cosine(pair, cos_p1), 1e-12);
    }
}

// Randomised properties over tables, caustics and tangency parameters.
class GeometryProperties : public ::testing::Test {
protected:
    std::mt19937_64 rng{20261016};

    template <class Body>
    void for_random_pairs(int count, Body&& body)
    {
        std::uniform_real_distribution<double> aspect(1.0, 6.0), frac(1e-3, 1 - 1e-3), angle(0.0, 2 * pi);
        for (int i = 0; i < count; ++i) {
            const BilliardTable t{aspect(rng), 1.0};
            const ConfocalPair pair(t, {frac(rng)});
            body(pair, angle(rng));
        }
    }
};

TEST_F(GeometryProperties, EndpointsOnBoundaryAndTangent)
{
    for_random_pairs(2000, [](const ConfocalPair& pair, double u) {
        const Chord ch = pair.chord(u);
        for (const Vec2& p : {ch.p1, ch.p2}) {
            ASSERT_NEAR(pair.table().boundary_residual(p), 0.0, 1e-12);
            ASSERT_NEAR(tangency_residual(pair, p, u), 0.0, 1e-10);
        }
        ASSERT_NEAR(pair.chord_length(u), (ch.p2 - ch.p1).norm(), 1e-11 * (1 + pair.a()));
    });
}

TEST_F(GeometryProperties, NextChordIsTheReflection)
{
    for_random_pairs(2000, [](const ConfocalPair& pair, double u) {
        const double v = pair.next_tangency(u);
        ASSERT_GT(v, u);
        ASSERT_LT(v, u + pi);
        const Chord in = pair.chord(u), out = pair.chord(v);
        ASSERT_LT((out.p2 - in.p1).norm(), 1e-10 * pair.a());
        // Reflection law: the normal bisects the incoming and outgoing directions.
        const Vec2 n = pair.table().normal(in.p1).normalized();
        const Vec2 d_in = (in.p1 - in.p2).normalized();
        const Vec2 d_out = (out.p1 - out.p2).normalized();
        ASSERT_LT((d_out - (d_in - 2 * d_in.dot(n) * n)).norm(), 1e-9);
        ASSERT_NEAR(pair.prev_tangency(v), u, 1e-10);
    });
}

TEST_F(GeometryProperties, JoachimsthalIsConstant)
{
    for_random_pairs(1000, [](const ConfocalPair& pair, double u) {
        const Chord ch = pair.chord(u);
        const Vec2 d = (ch.p1 - ch.p2).normalized();
        ASSERT_NEAR(pair.table().normal(ch.p1).dot(d), pair.joachimsthal(), 1e-11);
    });
}

TEST_F(GeometryProperties, MirrorSymmetry)
{
    for_random_pairs(500, [](const ConfocalPair& pair, double u) {
        ASSERT_NEAR(pair.chord_length(u), pair.chord_length(-u), 1e-12 * pair.a());
        ASSERT_NEAR(pair.chord_length(u), pair.chord_length(pi - u), 1e-12 * pair.a());
        ASSERT_NEAR(pair.interior_cosine(u), pair.interior_cosine(pi + u), 1e-10);
        ASSERT_NEAR(pair.measure_density(u), pair.measure_density(pi - u), 1e-13);
    });
}

TEST_F(GeometryProperties, CosinesAgreeAcrossForms)
{
    for_random_pairs(1000, [](const ConfocalPair& pair, double u) {
        const double geometric = pair.interior_cosine(u);
        ASSERT_NEAR(pair.interior_cosine_identity(u), geometric, 1e-9);
        ASSERT_NEAR(rational_cosine(pair)(u), geometric, 1e-9);
        ASSERT_NEAR(pair.outer_cosine(u), pair.outer_cosine_closed_form(u), 1e-9);
    });
}

} // namespace
