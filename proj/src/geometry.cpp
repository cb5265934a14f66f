#include "hillgate/geometry.hpp"

#include <cmath>
#include <limits>

namespace hillgate {

LevelSetRegion LevelSetRegion::ball(Vec center, double radius, SetLabel label) {
  if (!(radius > 0.0)) throw_invalid("ball: radius must be > 0");
  if (center.empty()) throw_invalid("ball: empty center");
  LevelSetRegion r;
  r.dimension_ = static_cast<int>(center.size());
  r.label_ = label;
  r.is_ball_ = true;
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

LevelSetRegion LevelSetRegion::custom(Phi phi, GradPhi grad_phi, int dimension, SetLabel label) {
  if (!phi || !grad_phi) throw_invalid("custom region: null phi or grad_phi");
  if (dimension < 1) throw_invalid("custom region: dimension must be >= 1");
  LevelSetRegion r;
  r.phi_ = std::move(phi);
  r.grad_ = std::move(grad_phi);
  r.dimension_ = dimension;
  r.label_ = label;
  return r;
}

double LevelSetRegion::phi(const Vec& q) const {
  if (is_ball_) {
    double s = 0.0;
    for (std::size_t i = 0; i < center_.size(); ++i) {
      const double d = q[i] - center_[i];
      s += d * d;
    }
    return s - radius_ * radius_;
  }
  return phi_(q);
}

void LevelSetRegion::grad_phi_into(const Vec& q, Vec& g_out) const {
  g_out.resize(q.size());
  if (is_ball_) {
    for (std::size_t i = 0; i < center_.size(); ++i) g_out[i] = 2.0 * (q[i] - center_[i]);
    return;
  }
  grad_(q, g_out);
}

Vec LevelSetRegion::grad_phi(const Vec& q) const {
  Vec g;
  grad_phi_into(q, g);
  return g;
}

bool LevelSetRegion::on_surface(const Vec& q, double tol_surface) const {
  return std::abs(phi(q)) <= tol_surface;
}

Vec LevelSetRegion::find_interior_point() const {
  if (is_ball_) return center_;
  Vec probe(dimension_, 0.0);
  if (phi(probe) < 0.0) return probe;
  for (double r : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (int i = 0; i < dimension_; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vec q(dimension_, 0.0);
        q[i] = sign * r;
        if (phi(q) < 0.0) return q;
      }
    }
  }
  throw_geometry(
      "cannot locate the interior of a custom level-set region from the probe "
      "grid; use a ball or recenter phi");
}

Vec LevelSetRegion::outward_normal(const Vec& q, const GeometryTolerances& tol) const {
  if (static_cast<int>(q.size()) != dimension_)
    throw_usage("outward_normal: dimension mismatch");
  if (!on_surface(q, tol.tol_surface))
    throw_usage("outward_normal: point is not on the boundary within tolerance");
  Vec g = grad_phi(q);
  const double gn = norm(g);
  if (gn < 1e-12) throw_geometry("outward_normal: degenerate |grad phi| < 1e-12");
  for (double& x : g) x /= gn;
  return g;
}

BoundarySide LevelSetRegion::classify_boundary(const Vec& q, const Vec& p,
                                               const GeometryTolerances& tol) const {
  const Vec n = outward_normal(q, tol);
  const double pn = dot(p, n);
  if (pn > tol.tol_tangent) return BoundarySide::gamma_plus;
  if (pn < -tol.tol_tangent) return BoundarySide::gamma_minus;
  return BoundarySide::gamma_zero;
}

namespace {

// Minimum pairwise distance between dense samplings of the two boundaries.
// Exact for two balls; grid-based otherwise (surface points found by walking
// rays from the region center out to {phi = 0} by bisection).
double boundary_distance(const LevelSetRegion& a, const LevelSetRegion& b) {
  if (a.is_ball() && b.is_ball()) {
    const double dc = norm(a.center() - b.center());
    return dc - a.radius() - b.radius();
  }
  // Sample points on each surface: in 1D the two level-set roots around the
  // center; in higher d rays in a fixed direction grid.
  auto surface_points = [](const LevelSetRegion& r) {
    std::vector<Vec> pts;
    const int d = r.dimension();
    const Vec origin = r.find_interior_point();
    const int n_dirs = d == 1 ? 2 : 256;
    for (int k = 0; k < n_dirs; ++k) {
      Vec dir(d, 0.0);
      if (d == 1) {
        dir[0] = k == 0 ? 1.0 : -1.0;
      } else {
        // unit directions on a coarse lattice of angles (d == 2 grid; higher d
        // falls back to axis directions)
        if (d == 2) {
          const double th = 2.0 * M_PI * k / n_dirs;
          dir[0] = std::cos(th);
          dir[1] = std::sin(th);
        } else {
          dir[k % d] = (k / d) % 2 == 0 ? 1.0 : -1.0;
        }
      }
      // bracket {phi=0} along origin + t*dir
      double lo = 0.0, hi = 1e-3;
      bool ok = false;
      for (int it = 0; it < 200; ++it) {
        Vec q = origin + hi * dir;
        if (r.phi(q) > 0.0) {
          ok = true;
          break;
        }
        lo = hi;
        hi *= 2.0;
      }
      if (!ok) continue;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        Vec q = origin + mid * dir;
        (r.phi(q) < 0.0 ? lo : hi) = mid;
      }
      pts.push_back(origin + 0.5 * (lo + hi) * dir);
    }
    return pts;
  };
  const auto pa = surface_points(a);
  const auto pb = surface_points(b);
  if (pa.empty() || pb.empty()) throw_geometry("cannot sample region boundary");
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& x : pa)
    for (const auto& y : pb) dmin = std::min(dmin, norm(x - y));
  return dmin;
}

}  // namespace

MetastablePair::MetastablePair(LevelSetRegion region_a, LevelSetRegion region_b,
                               double min_separation)
    : region_a_(std::move(region_a)), region_b_(std::move(region_b)) {
  if (region_a_.dimension() != region_b_.dimension())
    throw_invalid("MetastablePair: dimension mismatch");
  if (region_a_.label() == region_b_.label())
    throw_invalid("MetastablePair: regions must carry distinct labels");
  separation_ = boundary_distance(region_a_, region_b_);
  if (!(separation_ >= min_separation))
    throw_invalid("MetastablePair: closures of A and B are not disjoint (separation " +
                  std::to_string(separation_) + ")");
}

Location MetastablePair::locate(const Vec& q, const GeometryTolerances& tol) const {
  const double pa = region_a_.phi(q);
  const double pb = region_b_.phi(q);
  if (std::abs(pa) <= tol.tol_surface) return Location::near_boundary_A;
  if (std::abs(pb) <= tol.tol_surface) return Location::near_boundary_B;
  if (pa < 0.0) return Location::inside_A;
  if (pb < 0.0) return Location::inside_B;
  return Location::outside;
}

}  // namespace hillgate
