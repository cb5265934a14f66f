#pragma once

#include <utility>
#include <vector>

#include "hillgate/fields.hpp"
#include "hillgate/geometry.hpp"
#include "hillgate/integrator.hpp"
#include "hillgate/rng.hpp"
#include "hillgate/stats.hpp"

namespace hillgate {

// Describes one of the boundary invariant measures: the restriction of
// pi^+ / pi^- to one region's surface, with unnormalized density
// |p.n(q)| exp(-beta H(q,p)) on the requested side.
struct BoundaryMeasureSpec {
  LevelSetRegion region;
  ForceField field;
  double beta = 1.0;
  BoundarySide side = BoundarySide::gamma_minus;
  GeometryTolerances tol;

  void validate() const {
    if (!field.is_conservative())
      throw_unsupported("boundary measures are only explicit for conservative fields");
    if (side == BoundarySide::gamma_zero)
      throw_invalid("BoundaryMeasureSpec: side must be gamma_plus or gamma_minus");
    if (!(beta > 0.0)) throw_invalid("BoundaryMeasureSpec: beta must be > 0");
  }
};

enum class SurfaceMethod { direct_sphere, metropolis_projection };

struct SurfaceSamplerParams {
  SurfaceMethod method = SurfaceMethod::direct_sphere;
  int n_burnin = 256;
  double proposal_scale = 0.3;
  // internal Metropolis updates per emitted sample, to decorrelate draws
  int n_thin = 16;
};

// Orthonormal basis (e_2, ..., e_d) of the tangent space n^perp, built by
// Gram-Schmidt from the standard basis skipping the axis most aligned with n.
std::vector<Vec> tangent_basis(const Vec& n);

// Velocity draw of the two-step procedure: d+1 standard Gaussians G_0..G_d and
//   p = (1/sqrt(beta)) (+/- sqrt(G_0^2+G_1^2) n + G_2 e_2 + ... + G_d e_d),
// sign + on gamma_plus, - on gamma_minus.
Vec sample_velocity(const Vec& n, double beta, BoundarySide side, RngStream& rng);
Vec velocity_from_gaussians(const Vec& n, double beta, BoundarySide side,
                            const std::vector<double>& gaussians);

// Position sampler for the surface density proportional to exp(-beta V) d sigma.
// direct_sphere uses a uniform-on-sphere independence proposal with Metropolis
// correction (exact categorical draw in 1d, where the sphere is two atoms);
// metropolis_projection does tangent random-walk steps followed by Newton
// projection back to {phi = 0} (surface-measure Jacobian taken as 1, exact for
// spheres). Draws after burn-in are separated by n_thin internal updates.
class SurfacePositionSampler {
 public:
  SurfacePositionSampler(const BoundaryMeasureSpec& spec, const SurfaceSamplerParams& params);

  Vec sample(RngStream& rng);

 private:
  void ensure_initialized(RngStream& rng);
  void mh_update(RngStream& rng);

  BoundaryMeasureSpec spec_;
  SurfaceSamplerParams params_;
  Vec q_;
  double v_cur_ = 0.0;
  bool initialized_ = false;
};

// Full phase-space sampler for pi^{+/-} restricted to one region's boundary
// (the conditional measures pi_{A+-} when the region is dA).
class BoundarySampler {
 public:
  explicit BoundarySampler(BoundaryMeasureSpec spec, SurfaceSamplerParams params = {});

  PhasePoint sample(RngStream& rng);

  // Unnormalized density |p.n| e^{-beta H} on the spec side, 0 elsewhere;
  // usage error off the surface.
  double density(const PhasePoint& x) const;

  const BoundaryMeasureSpec& spec() const { return spec_; }

 private:
  BoundaryMeasureSpec spec_;
  SurfacePositionSampler position_;
};

double density_pi(const BoundaryMeasureSpec& spec, const PhasePoint& x);
Vec sample_surface_position(const BoundaryMeasureSpec& spec, const SurfaceSamplerParams& params,
                            RngStream& rng);
PhasePoint sample_pi(const BoundaryMeasureSpec& spec, const SurfaceSamplerParams& params,
                     RngStream& rng);

// pi^{+/-} over the full boundary of A u B: picks the component with
// probability proportional to its surface Boltzmann mass, then samples the
// component conditional.
class PairBoundarySampler {
 public:
  PairBoundarySampler(const MetastablePair& pair, const ForceField& field, double beta,
                      BoundarySide side, SurfaceSamplerParams params = {});

  std::pair<PhasePoint, SetLabel> sample(RngStream& rng);
  double weight_A() const { return weight_a_; }

 private:
  BoundarySampler sampler_a_;
  BoundarySampler sampler_b_;
  double weight_a_ = 0.5;
};

// Surface integral of exp(-beta V) over the region boundary: exact atom sum
// in 1d, Gauss-Legendre in angle for 2d balls; unsupported otherwise.
double surface_boltzmann_integral(const LevelSetRegion& region, const ForceField& field,
                                  double beta);

// Z^{+/-} with the momentum-Gaussian-normalized convention: (surface integral
// of e^{-beta V}) x (half-moment of the 1d Gaussian, integral |x| over one
// side). The half-moment is computed by quadrature; its closed form
// 1/sqrt(2 pi beta) serves as an internal cross-check.
struct ZConstants {
  double z_plus = 0.0;
  double z_minus = 0.0;
};
ZConstants z_constants(const MetastablePair& pair, const ForceField& field, double beta);
ZConstants z_constants_region(const LevelSetRegion& region, const ForceField& field, double beta);

double gaussian_half_moment_quadrature(double beta, bool positive_side);
inline double gaussian_half_moment_closed_form(double beta) {
  return 1.0 / std::sqrt(2.0 * M_PI * beta);
}

// Importance-sampling Monte Carlo estimate of Z for the same convention:
// q uniform on the boundary, p Gaussian, weight |Sigma| |p.n| 1{side} e^{-beta V}.
MeanStderr z_monte_carlo(const MetastablePair& pair, const ForceField& field, double beta,
                         BoundarySide side, std::size_t n, RngStream& rng);

}  // namespace hillgate
