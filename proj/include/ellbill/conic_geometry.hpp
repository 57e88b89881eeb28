#ifndef ELLBILL_CONIC_GEOMETRY_HPP
#define ELLBILL_CONIC_GEOMETRY_HPP

// Pointwise geometry of a confocal pair: the billiard ellipse
// x^2/a^2 + y^2/b^2 = 1 and the elliptic caustic
// x^2/(a^2 - lambda) + y^2/(b^2 - lambda) = 1, 0 < lambda < b^2.
//
// Chords are parameterized by the eccentric angle u of their tangency point
// on the caustic. With the branch zeta >= 0 the endpoint P1(u) lies ahead of
// P2(u) in the counterclockwise sense, so a trajectory traverses each chord
// from P2(u) to P1(u).

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ellbill/errors.hpp"

namespace ellbill {

using Vec2 = Eigen::Vector2d;

/// Outer ellipse with semi-axes a >= b > 0. a == b is the circular table.
class BilliardTable {
public:
    BilliardTable(double a, double b) : a_(a), b_(b)
    {
        if (!(b > 0.0) || !(a >= b) || !std::isfinite(a * a)) {
            std::ostringstream os;
            os << "BilliardTable: need a >= b > 0, got a = " << a << ", b = " << b;
            throw DomainError(os.str());
        }
    }

    double a() const { return a_; }
    double b() const { return b_; }
    /// Squared focal half-distance a^2 - b^2.
    double c2() const { return a_ * a_ - b_ * b_; }

    /// Residual x^2/a^2 + y^2/b^2 - 1.
    double boundary_residual(const Vec2& p) const
    {
        return p.x() * p.x() / (a_ * a_) + p.y() * p.y() / (b_ * b_) - 1.0;
    }

    /// The diagonal form diag(1/a^2, 1/b^2) applied to p; an outward normal at boundary points.
    Vec2 normal(const Vec2& p) const { return {p.x() / (a_ * a_), p.y() / (b_ * b_)}; }

    Vec2 point_at(double t) const { return {a_ * std::cos(t), b_ * std::sin(t)}; }

    friend bool operator==(const BilliardTable&, const BilliardTable&) = default;

private:
    double a_;
    double b_;
};

/// Selects one confocal elliptic caustic by its parameter lambda.
struct CausticSpec {
    double lambda;
};

struct CausticAxes {
    double a_c;
    double b_c;
};

struct CausticPoint {
    double u;
    Vec2 point;
};

struct Chord {
    double u;
    Vec2 p1;
    Vec2 p2;
};

struct FocalDistances {
    double d1;
    double d2;
};

inline void require_on_boundary(const BilliardTable& table, const Vec2& p, const char* what)
{
    if (!(std::abs(table.boundary_residual(p)) <= 1e-8)) {
        std::ostringstream os;
        os << what << ": point (" << p.x() << ", " << p.y() << ") is not on the billiard boundary"
           << " (residual " << table.boundary_residual(p) << ")";
        throw DomainError(os.str());
    }
}

/// A validated (table, caustic) pair with the derived constants cached.
/// All pointwise operations live here; the free functions below forward to it.
class ConfocalPair {
public:
    ConfocalPair(const BilliardTable& table, CausticSpec caustic) : table_(table), lambda_(caustic.lambda)
    {
        const double b2 = table.b() * table.b();
        if (!(lambda_ > 0.0)) {
            std::ostringstream os;
            os << "caustic parameter lambda = " << lambda_ << " violates lambda > 0";
            throw DomainError(os.str());
        }
        if (!(lambda_ < b2)) {
            std::ostringstream os;
            os << "caustic parameter lambda = " << lambda_ << " violates lambda < b^2 = " << b2;
            throw DomainError(os.str());
        }
        const double a = table.a();
        ac2_ = a * a - lambda_;
        bc2_ = b2 - lambda_;
        ac_ = std::sqrt(ac2_);
        bc_ = std::sqrt(bc2_);
        sqrt_lambda_ = std::sqrt(lambda_);
        c2_ = table.c2();
        ca_ = a * a * b2 - lambda_ * (a * a + b2);
    }

    const BilliardTable& table() const { return table_; }
    double lambda() const { return lambda_; }
    double a() const { return table_.a(); }
    double b() const { return table_.b(); }
    double c2() const { return c2_; }
    double ac() const { return ac_; }
    double bc() const { return bc_; }
    double ac2() const { return ac2_; }
    double bc2() const { return bc2_; }
    /// a^2 b^2 - lambda (a^2 + b^2); zero exactly on the 4-periodic caustic.
    double ca() const { return ca_; }

    double joachimsthal() const { return sqrt_lambda_ / (a() * b()); }

    CausticPoint caustic_point(double u) const { return {u, {ac_ * std::cos(u), bc_ * std::sin(u)}}; }

    Chord chord(double u) const
    {
        const double a = this->a(), b = this->b();
        const double xc = ac_ * std::cos(u);
        const double yc = bc_ * std::sin(u);
        const double bc4x2 = bc2_ * bc2_ * xc * xc;
        const double ac4y2 = ac2_ * ac2_ * yc * yc;
        const double zeta = sqrt_lambda_ * std::sqrt(bc4x2 + ac4y2);
        const double psi = a * a * bc4x2 + b * b * ac4y2;
        if (!(psi > 0.0)) {
            std::ostringstream os;
            os << "chord: internal error, psi = " << psi << " at u = " << u << ", lambda = " << lambda_;
            throw NumericalError(os.str());
        }
        const double xa = ac2_ * a * a * bc2_ * bc2_ * xc;
        const double xb = ac2_ * a * zeta * b * yc;
        const double ya = bc2_ * b * b * ac2_ * ac2_ * yc;
        const double yb = bc2_ * b * zeta * a * xc;
        return {u, Vec2{xa - xb, ya + yb} / psi, Vec2{xa + xb, ya - yb} / psi};
    }

    /// |P2 - P1| in closed form.
    double chord_length(double u) const
    {
        const double cos2 = std::pow(std::cos(u), 2);
        return 2.0 * a() * b() * sqrt_lambda_ * (c2_ * cos2 - ac2_)
            / (lambda_ * c2_ * cos2 - ac2_ * b() * b());
    }

    /// Corrected vertex-angle identity cos(theta) = 2 lambda / (d1 d2) - 1 at a boundary point.
    double vertex_cosine_identity(const Vec2& p) const
    {
        const double a2 = a() * a(), b2 = b() * b();
        const double d1d2 = (b2 * b2 * p.x() * p.x() + a2 * a2 * p.y() * p.y()) / (a2 * b2);
        return 2.0 * lambda_ / d1d2 - 1.0;
    }

    /// Mean of the identity-based vertex cosines at both chord endpoints.
    double interior_cosine_identity(double u) const
    {
        const Chord ch = chord(u);
        return 0.5 * (vertex_cosine_identity(ch.p1) + vertex_cosine_identity(ch.p2));
    }

    /// Cosine of the interior angle of the outer (tangential) polygon at the
    /// intersection of the billiard tangents through p and q.
    double outer_cosine(const Vec2& p, const Vec2& q) const
    {
        const Vec2 np = table_.normal(p);
        const Vec2 nq = table_.normal(q);
        return -np.dot(nq) / (np.norm() * nq.norm());
    }

    double outer_cosine(double u) const
    {
        const Chord ch = chord(u);
        return outer_cosine(ch.p1, ch.p2);
    }

    /// Closed form of outer_cosine(u):
    ///   -c_a sqrt((a^2 - lambda) - c^2 cos^2 u)
    ///     / sqrt((2 b^2 lambda + c_a)^2 (a^2 - lambda) - c^2 c_a^2 cos^2 u)
    double outer_cosine_closed_form(double u) const
    {
        const double cos2 = std::pow(std::cos(u), 2);
        const double k = 2.0 * b() * b() * lambda_ + ca_;
        return -ca_ * std::sqrt(ac2_ - c2_ * cos2) / std::sqrt(k * k * ac2_ - c2_ * ca_ * ca_ * cos2);
    }

    /// -sign(c_a): the sign shared by every outer cosine on this caustic.
    int outer_sign() const
    {
        if (ca_is_zero())
            return 0;
        return ca_ > 0.0 ? -1 : 1;
    }

    bool ca_is_zero() const
    {
        const double scale = a() * a() * b() * b();
        return std::abs(ca_) <= 8.0 * std::numeric_limits<double>::epsilon() * scale;
    }

    /// Invariant density rho(u) = kappa_c^{2/3} ds/du.
    double measure_density(double u) const
    {
        const double cos2 = std::pow(std::cos(u), 2);
        return std::cbrt(ac2_) * std::cbrt(bc2_) / std::sqrt(ac2_ - c2_ * cos2);
    }

    /// Tangency parameter of the chord that continues the trajectory past P1(u);
    /// the result lies in (u, u + pi).
    double next_tangency(double u) const;

    /// Inverse of next_tangency: the chord arriving at P2(u); result in (u - pi, u).
    double prev_tangency(double u) const;

    /// Geometric interior cosine at both endpoints of chord(u), averaged.
    double interior_cosine(double u) const;

    /// (R^2 - 1) for the point p, where R^2 = x^2/a_c^2 + y^2/b_c^2. Positive
    /// outside the caustic; written without cancellation for boundary points.
    double excess(const Vec2& p) const
    {
        return lambda_ * (p.x() * p.x() / (a() * a() * ac2_) + p.y() * p.y() / (b() * b() * bc2_));
    }

private:
    double other_tangency(const Vec2& p, double u, int direction) const;

    BilliardTable table_;
    double lambda_;
    double ac2_ = 0.0, bc2_ = 0.0, ac_ = 0.0, bc_ = 0.0;
    double sqrt_lambda_ = 0.0, c2_ = 0.0, ca_ = 0.0;
};

/// Cosine of the angle at `vertex` between the rays to `prev` and `next`.
inline double vertex_angle_cosine(const Vec2& prev, const Vec2& vertex, const Vec2& next)
{
    const Vec2 e1 = prev - vertex;
    const Vec2 e2 = next - vertex;
    return std::clamp(e1.dot(e2) / (e1.norm() * e2.norm()), -1.0, 1.0);
}

inline double ConfocalPair::other_tangency(const Vec2& p, double u, int direction) const
{
    // Tangency parameters t of the caustic tangents through p solve
    //   (x/a_c) cos t + (y/b_c) sin t = 1,  i.e.  t = phi +- delta,
    // with R = |(x/a_c, y/b_c)|, phi its polar angle and cos(delta) = 1/R.
    const double A = p.x() / ac_;
    const double B = p.y() / bc_;
    const double phi = std::atan2(B, A);
    const double excess_r2 = excess(p);
    const double delta = std::atan(std::sqrt(excess_r2));
    constexpr double two_pi = 2.0 * std::numbers::pi;

    const double current = phi - direction * delta;
    const double mismatch = std::remainder(current - u, two_pi);
    if (excess_r2 > 0.0 && std::abs(mismatch) < std::min(1e-7, delta)) {
        const double guess = u + direction * 2.0 * delta;
        return guess + std::remainder(phi + direction * delta - guess, two_pi);
    }

    // Fallback: bisection on f(t) = A cos t + B sin t - 1, positive between the
    // two tangencies, over the half-turn starting at the far side of phi.
    auto f = [&](double t) { return A * std::cos(t) + B * std::sin(t) - 1.0; };
    double lo = u + std::remainder(phi - u, two_pi);
    if (direction * (lo - u) < 0.0)
        lo += direction * two_pi;
    double hi = lo + direction * std::numbers::pi;
    if (!(f(lo) > 0.0 && f(hi) < 0.0)) {
        std::ostringstream os;
        os << "next_tangency: failed to bracket the tangency at u = " << u << ", lambda = " << lambda_
           << " (f(lo) = " << f(lo) << ", f(hi) = " << f(hi) << ", mismatch = " << mismatch << ")";
        throw NumericalError(os.str());
    }
    for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    if (!(std::abs(f(t)) < 1e-9)) {
        std::ostringstream os;
        os << "next_tangency: root solve failed at u = " << u << ", lambda = " << lambda_
           << ", residual " << f(t);
        throw NumericalError(os.str());
    }
    return t;
}

inline double ConfocalPair::next_tangency(double u) const { return other_tangency(chord(u).p1, u, +1); }

inline double ConfocalPair::prev_tangency(double u) const { return other_tangency(chord(u).p2, u, -1); }

inline double ConfocalPair::interior_cosine(double u) const
{
    const Chord ch = chord(u);
    const Chord ahead = chord(next_tangency(u));
    const Chord behind = chord(prev_tangency(u));
    const double at_p1 = vertex_angle_cosine(ch.p2, ch.p1, ahead.p1);
    const double at_p2 = vertex_angle_cosine(behind.p2, ch.p2, ch.p1);
    return 0.5 * (at_p1 + at_p2);
}

/// Coefficients of cos(theta)(u) = (r1 + r2 cos^2 u) / (r3 + r4 cos^2 u)
///                               = (r1/r3) (1 - s1 cos^2 u) / (1 - s2 cos^2 u).
///
/// The usual printed r1, r2 encode the vertex identity lambda / (2 d1 d2) - 1,
/// which is off by a factor of four (it gives -3/4 instead of 0 on the
/// square family of the unit circle). With the corrected identity
/// 2 lambda / (d1 d2) - 1 = 4 (printed form) + 3, so r1 -> 4 r1 + 3 r3 and
/// r2 -> 4 r2 + 3 r4 while r3, r4 are unchanged.
struct RationalCosine {
    double r1;
    double r2;
    double r3;
    double r4;

    /// -r2/r1; infinite when r1 == 0.
    double s1() const { return -r2 / r1; }
    double s2() const { return -r4 / r3; }

    double operator()(double u) const
    {
        const double cos2 = std::pow(std::cos(u), 2);
        return (r1 + r2 * cos2) / (r3 + r4 * cos2);
    }
};

inline RationalCosine rational_cosine(const ConfocalPair& pair)
{
    const double a2 = pair.a() * pair.a(), b2 = pair.b() * pair.b();
    const double l = pair.lambda();
    const double c2 = pair.c2();
    const double ab2 = a2 * b2;
    const double p1 = (a2 - l) * (ab2 - c2 * l) * (2.0 * ab2 - 2.0 * a2 * l + b2 * l);
    const double p2 = -c2 * pair.ca() * (2.0 * ab2 - 2.0 * a2 * l - 2.0 * b2 * l + l * l);
    const double r3 = -2.0 * (a2 - l) * std::pow(ab2 - c2 * l, 2);
    const double r4 = 2.0 * c2 * pair.ca() * pair.ca();
    return {4.0 * p1 + 3.0 * r3, 4.0 * p2 + 3.0 * r4, r3, r4};
}

// Free-function surface.

inline CausticAxes caustic_axes(const BilliardTable& table, CausticSpec caustic)
{
    const ConfocalPair pair(table, caustic);
    return {pair.ac(), pair.bc()};
}

inline double joachimsthal(const BilliardTable& table, CausticSpec caustic)
{
    return ConfocalPair(table, caustic).joachimsthal();
}

inline Chord chord_endpoints(const BilliardTable& table, CausticSpec caustic, double u)
{
    return ConfocalPair(table, caustic).chord(u);
}

inline double chord_length(const BilliardTable& table, CausticSpec caustic, double u)
{
    return ConfocalPair(table, caustic).chord_length(u);
}

inline FocalDistances focal_distances(const BilliardTable& table, const Vec2& p)
{
    require_on_boundary(table, p, "focal_distances");
    const double c = std::sqrt(table.c2());
    return {(p - Vec2{c, 0.0}).norm(), (p - Vec2{-c, 0.0}).norm()};
}

inline double interior_cosine(const BilliardTable& table, CausticSpec caustic, double u)
{
    return ConfocalPair(table, caustic).interior_cosine(u);
}

inline double interior_cosine_rational(const BilliardTable& table, CausticSpec caustic, double u)
{
    return rational_cosine(ConfocalPair(table, caustic))(u);
}

inline double outer_cosine(const BilliardTable& table, CausticSpec caustic, double u)
{
    return ConfocalPair(table, caustic).outer_cosine(u);
}

inline double measure_density(const BilliardTable& table, CausticSpec caustic, double u)
{
    return ConfocalPair(table, caustic).measure_density(u);
}

/// kappa^{2/3} = (ab)^{-4/3} (x^2/a^4 + y^2/b^4)^{-1} of the billiard at p.
inline double curvature23(const BilliardTable& table, const Vec2& p)
{
    require_on_boundary(table, p, "curvature23");
    const Vec2 n = table.normal(p);
    return std::pow(table.a() * table.b(), -4.0 / 3.0) / n.squaredNorm();
}

/// kappa^{2/3} from the vertex cosine: (ab)^{-4/3} (1 + cos theta) / (2 J^2).
/// The commonly printed version carries a trailing "- 1" that does not belong there.
inline double curvature23_from_cosine(const ConfocalPair& pair, double vertex_cosine)
{
    const double j = pair.joachimsthal();
    return std::pow(pair.a() * pair.b(), -4.0 / 3.0) * (1.0 + vertex_cosine) / (2.0 * j * j);
}

} // namespace ellbill

#endif
