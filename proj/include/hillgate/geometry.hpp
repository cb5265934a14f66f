#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hillgate/errors.hpp"
#include "hillgate/vec.hpp"

namespace hillgate {

enum class SetLabel { A, B };
inline const char* to_string(SetLabel s) { return s == SetLabel::A ? "A" : "B"; }

// Gamma^+ : p.n > 0 (outgoing), Gamma^- : p.n < 0 (incoming), Gamma^0 : tangential.
enum class BoundarySide { gamma_plus, gamma_minus, gamma_zero };
inline const char* to_string(BoundarySide s) {
  switch (s) {
    case BoundarySide::gamma_plus: return "gamma_plus";
    case BoundarySide::gamma_minus: return "gamma_minus";
    default: return "gamma_zero";
  }
}

struct GeometryTolerances {
  double tol_surface = 1e-10;  // |phi| band treated as "on Sigma"
  double tol_tangent = 1e-10;  // |p.n| band classified gamma_zero
};

// A smooth open region {phi < 0} with boundary Sigma = {phi = 0}.
// Built-in regions are balls: phi(q) = |q - c|^2 - r^2, so normals are exact.
class LevelSetRegion {
 public:
  using Phi = std::function<double(const Vec&)>;
  using GradPhi = std::function<void(const Vec&, Vec&)>;

  static LevelSetRegion ball(Vec center, double radius, SetLabel label);
  static LevelSetRegion custom(Phi phi, GradPhi grad_phi, int dimension, SetLabel label);

  double phi(const Vec& q) const;
  void grad_phi_into(const Vec& q, Vec& g_out) const;
  Vec grad_phi(const Vec& q) const;

  int dimension() const noexcept { return dimension_; }
  SetLabel label() const noexcept { return label_; }
  bool is_ball() const noexcept { return is_ball_; }
  const Vec& center() const { return center_; }
  double radius() const noexcept { return radius_; }

  bool contains(const Vec& q) const { return phi(q) < 0.0; }
  bool on_surface(const Vec& q, double tol_surface) const;

  // Ball center, or a probe-grid point with phi < 0 for custom level sets;
  // geometry error when no probe lands inside.
  Vec find_interior_point() const;

  // Unit outward normal grad phi / |grad phi| at a point on Sigma.
  Vec outward_normal(const Vec& q, const GeometryTolerances& tol = {}) const;

  BoundarySide classify_boundary(const Vec& q, const Vec& p,
                                 const GeometryTolerances& tol = {}) const;

 private:
  LevelSetRegion() = default;

  Phi phi_;
  GradPhi grad_;
  int dimension_ = 1;
  SetLabel label_ = SetLabel::A;
  bool is_ball_ = false;
  Vec center_;
  double radius_ = 0.0;
};

enum class Location { inside_A, inside_B, outside, near_boundary_A, near_boundary_B };

// Metastable pair A, B with disjoint closures; separation is the minimum
// boundary-to-boundary distance, validated on a dense grid at construction
// (exactly for two balls).
class MetastablePair {
 public:
  MetastablePair(LevelSetRegion region_a, LevelSetRegion region_b, double min_separation = 1e-8);

  const LevelSetRegion& region(SetLabel s) const {
    return s == SetLabel::A ? region_a_ : region_b_;
  }
  const LevelSetRegion& region_a() const { return region_a_; }
  const LevelSetRegion& region_b() const { return region_b_; }
  int dimension() const { return region_a_.dimension(); }
  double separation() const noexcept { return separation_; }

  Location locate(const Vec& q, const GeometryTolerances& tol = {}) const;

 private:
  LevelSetRegion region_a_;
  LevelSetRegion region_b_;
  double separation_ = 0.0;
};

}  // namespace hillgate
