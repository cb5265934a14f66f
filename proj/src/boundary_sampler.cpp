#include "hillgate/boundary_sampler.hpp"

#include <cmath>

#include "hillgate/quadrature.hpp"

namespace hillgate {

std::vector<Vec> tangent_basis(const Vec& n) {
  const std::size_t d = n.size();
  std::vector<Vec> basis;
  if (d == 1) return basis;
  std::size_t skip = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (std::abs(n[i]) > std::abs(n[skip])) skip = i;
  for (std::size_t k = 0; k < d; ++k) {
    if (k == skip) continue;
    Vec v(d, 0.0);
    v[k] = 1.0;
    const double vn = dot(v, n);
    for (std::size_t i = 0; i < d; ++i) v[i] -= vn * n[i];
    for (const auto& b : basis) {
      const double vb = dot(v, b);
      for (std::size_t i = 0; i < d; ++i) v[i] -= vb * b[i];
    }
    const double nv = norm(v);
    if (nv < 1e-12) throw_numerical("tangent_basis: degenerate Gram-Schmidt step");
    for (double& x : v) x /= nv;
    basis.push_back(std::move(v));
  }
  return basis;
}

Vec velocity_from_gaussians(const Vec& n, double beta, BoundarySide side,
                            const std::vector<double>& gaussians) {
  const std::size_t d = n.size();
  if (std::abs(norm(n) - 1.0) > 1e-9) throw_usage("sample_velocity: n must be a unit vector");
  if (side == BoundarySide::gamma_zero)
    throw_invalid("sample_velocity: side must be gamma_plus or gamma_minus");
  if (gaussians.size() != d + 1) throw_usage("sample_velocity: needs d+1 Gaussian variables");
  const double sign = side == BoundarySide::gamma_plus ? 1.0 : -1.0;
  const double normal_mag =
      std::sqrt(gaussians[0] * gaussians[0] + gaussians[1] * gaussians[1]);
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);
  Vec p(d);
  for (std::size_t i = 0; i < d; ++i) p[i] = sign * normal_mag * n[i] * inv_sqrt_beta;
  if (d > 1) {
    const auto basis = tangent_basis(n);
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (std::size_t i = 0; i < d; ++i)
        p[i] += gaussians[k + 2] * basis[k][i] * inv_sqrt_beta;
  }
  return p;
}

Vec sample_velocity(const Vec& n, double beta, BoundarySide side, RngStream& rng) {
  std::vector<double> g(n.size() + 1);
  for (double& x : g) x = rng.normal();
  return velocity_from_gaussians(n, beta, side, g);
}

namespace {

Vec uniform_sphere_point(const LevelSetRegion& region, RngStream& rng) {
  const std::size_t d = region.center().size();
  if (d == 1) {
    Vec q(1);
    q[0] = region.center()[0] + (rng.uniform() < 0.5 ? -1.0 : 1.0) * region.radius();
    return q;
  }
  Vec u(d);
  double nn = 0.0;
  do {
    for (double& x : u) x = rng.normal();
    nn = norm(u);
  } while (nn < 1e-12);
  Vec q(d);
  for (std::size_t i = 0; i < d; ++i)
    q[i] = region.center()[i] + region.radius() * u[i] / nn;
  return q;
}

// Newton projection onto {phi = 0} along grad phi.
Vec project_to_surface(const LevelSetRegion& region, Vec q) {
  Vec g;
  for (int it = 0; it < 100; ++it) {
    const double ph = region.phi(q);
    if (std::abs(ph) <= 1e-13) return q;
    region.grad_phi_into(q, g);
    const double g2 = norm2(g);
    if (g2 < 1e-24 || !std::isfinite(g2))
      throw_geometry("projection to surface diverged: degenerate gradient");
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= ph * g[i] / g2;
    if (!all_finite(q)) throw_geometry("projection to surface diverged");
  }
  throw_geometry("projection to surface did not converge in 100 iterations");
}

// A starting point on {phi = 0}: walk a ray from the region's interior.
Vec initial_surface_point(const LevelSetRegion& region, RngStream& rng) {
  if (region.is_ball()) return uniform_sphere_point(region, rng);
  const int d = region.dimension();
  const Vec origin = region.find_interior_point();
  Vec dir(d, 0.0);
  dir[0] = 1.0;
  double lo = 0.0, hi = 1e-3;
  for (int it = 0; it < 400; ++it) {
    if (region.phi(origin + hi * dir) > 0.0) break;
    lo = hi;
    hi *= 2.0;
    if (it == 399) throw_geometry("custom region sampler: no surface found along ray");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (region.phi(origin + mid * dir) < 0.0 ? lo : hi) = mid;
  }
  return project_to_surface(region, origin + 0.5 * (lo + hi) * dir);
}

}  // namespace

SurfacePositionSampler::SurfacePositionSampler(const BoundaryMeasureSpec& spec,
                                               const SurfaceSamplerParams& params)
    : spec_(spec), params_(params) {
  spec_.validate();
  if (params_.n_burnin < 0) throw_invalid("SurfaceSamplerParams: n_burnin must be >= 0");
  if (params_.n_thin < 1) throw_invalid("SurfaceSamplerParams: n_thin must be >= 1");
  if (params_.method == SurfaceMethod::direct_sphere && !spec_.region.is_ball())
    throw_unsupported("direct_sphere requires a built-in ball region");
}

void SurfacePositionSampler::ensure_initialized(RngStream& rng) {
  if (initialized_) return;
  q_ = initial_surface_point(spec_.region, rng);
  v_cur_ = spec_.field.potential_energy(q_);
  for (int k = 0; k < params_.n_burnin; ++k) mh_update(rng);
  initialized_ = true;
}

void SurfacePositionSampler::mh_update(RngStream& rng) {
  Vec q_prop;
  if (params_.method == SurfaceMethod::direct_sphere) {
    q_prop = uniform_sphere_point(spec_.region, rng);
  } else {
    const Vec g = spec_.region.grad_phi(q_);
    const double gn = norm(g);
    if (gn < 1e-12) throw_geometry("surface sampler: degenerate gradient");
    Vec n(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) n[i] = g[i] / gn;
    Vec xi(q_.size());
    for (double& x : xi) x = rng.normal();
    const double xin = dot(xi, n);
    Vec q_try = q_;
    for (std::size_t i = 0; i < q_.size(); ++i)
      q_try[i] += params_.proposal_scale * (xi[i] - xin * n[i]);
    q_prop = project_to_surface(spec_.region, std::move(q_try));
  }
  const double v_prop = spec_.field.potential_energy(q_prop);
  const double log_ratio = -spec_.beta * (v_prop - v_cur_);
  if (log_ratio >= 0.0 || rng.uniform_pos() < std::exp(log_ratio)) {
    q_ = std::move(q_prop);
    v_cur_ = v_prop;
  }
}

Vec SurfacePositionSampler::sample(RngStream& rng) {
  // In 1d the surface is two atoms and the draw is an exact categorical one.
  if (spec_.region.is_ball() && spec_.region.dimension() == 1 &&
      params_.method == SurfaceMethod::direct_sphere) {
    const double c = spec_.region.center()[0], r = spec_.region.radius();
    const double w_lo = std::exp(-spec_.beta * spec_.field.potential_energy({c - r}));
    const double w_hi = std::exp(-spec_.beta * spec_.field.potential_energy({c + r}));
    return {rng.uniform() * (w_lo + w_hi) < w_lo ? c - r : c + r};
  }
  ensure_initialized(rng);
  for (int k = 0; k < params_.n_thin; ++k) mh_update(rng);
  return q_;
}

BoundarySampler::BoundarySampler(BoundaryMeasureSpec spec, SurfaceSamplerParams params)
    : spec_(std::move(spec)), position_(spec_, params) {
  spec_.validate();
}

PhasePoint BoundarySampler::sample(RngStream& rng) {
  PhasePoint x;
  x.q = position_.sample(rng);
  const Vec n = spec_.region.outward_normal(x.q, spec_.tol);
  x.p = sample_velocity(n, spec_.beta, spec_.side, rng);
  return x;
}

double BoundarySampler::density(const PhasePoint& x) const { return density_pi(spec_, x); }

double density_pi(const BoundaryMeasureSpec& spec, const PhasePoint& x) {
  spec.validate();
  if (!spec.region.on_surface(x.q, spec.tol.tol_surface))
    throw_usage("density_pi: position is not on the surface within tolerance");
  const Vec n = spec.region.outward_normal(x.q, spec.tol);
  const double pn = dot(x.p, n);
  const bool on_side = spec.side == BoundarySide::gamma_plus ? pn > spec.tol.tol_tangent
                                                             : pn < -spec.tol.tol_tangent;
  if (!on_side) return 0.0;
  return std::abs(pn) * std::exp(-spec.beta * spec.field.hamiltonian(x.q, x.p));
}

Vec sample_surface_position(const BoundaryMeasureSpec& spec, const SurfaceSamplerParams& params,
                            RngStream& rng) {
  SurfacePositionSampler s(spec, params);
  return s.sample(rng);
}

PhasePoint sample_pi(const BoundaryMeasureSpec& spec, const SurfaceSamplerParams& params,
                     RngStream& rng) {
  BoundarySampler s(spec, params);
  return s.sample(rng);
}

PairBoundarySampler::PairBoundarySampler(const MetastablePair& pair, const ForceField& field,
                                         double beta, BoundarySide side,
                                         SurfaceSamplerParams params)
    : sampler_a_(BoundaryMeasureSpec{pair.region_a(), field, beta, side}, params),
      sampler_b_(BoundaryMeasureSpec{pair.region_b(), field, beta, side}, params) {
  const double wa = surface_boltzmann_integral(pair.region_a(), field, beta);
  const double wb = surface_boltzmann_integral(pair.region_b(), field, beta);
  weight_a_ = wa / (wa + wb);
}

std::pair<PhasePoint, SetLabel> PairBoundarySampler::sample(RngStream& rng) {
  if (rng.uniform() < weight_a_) return {sampler_a_.sample(rng), SetLabel::A};
  return {sampler_b_.sample(rng), SetLabel::B};
}

double surface_boltzmann_integral(const LevelSetRegion& region, const ForceField& field,
                                  double beta) {
  if (!region.is_ball())
    throw_unsupported("surface integrals are implemented for built-in balls only");
  const int d = region.dimension();
  if (d == 1) {
    const double c = region.center()[0], r = region.radius();
    return std::exp(-beta * field.potential_energy({c - r})) +
           std::exp(-beta * field.potential_energy({c + r}));
  }
  if (d == 2) {
    const double r = region.radius();
    const Vec& c = region.center();
    auto f = [&](double th) {
      Vec q = {c[0] + r * std::cos(th), c[1] + r * std::sin(th)};
      return std::exp(-beta * field.potential_energy(q));
    };
    return r * gauss_legendre(f, 0.0, 2.0 * M_PI, 64);
  }
  throw_unsupported("surface integrals support d in {1, 2} only");
}

double gaussian_half_moment_quadrature(double beta, bool positive_side) {
  const double xmax = 12.0 / std::sqrt(beta);
  const double c = std::sqrt(beta / (2.0 * M_PI));
  auto f = [&](double x) { return std::abs(x) * c * std::exp(-0.5 * beta * x * x); };
  return positive_side ? gauss_legendre(f, 0.0, xmax, 64) : gauss_legendre(f, -xmax, 0.0, 64);
}

ZConstants z_constants_region(const LevelSetRegion& region, const ForceField& field,
                              double beta) {
  const double s = surface_boltzmann_integral(region, field, beta);
  ZConstants z;
  z.z_plus = s * gaussian_half_moment_quadrature(beta, true);
  z.z_minus = s * gaussian_half_moment_quadrature(beta, false);
  return z;
}

ZConstants z_constants(const MetastablePair& pair, const ForceField& field, double beta) {
  const ZConstants za = z_constants_region(pair.region_a(), field, beta);
  const ZConstants zb = z_constants_region(pair.region_b(), field, beta);
  return {za.z_plus + zb.z_plus, za.z_minus + zb.z_minus};
}

MeanStderr z_monte_carlo(const MetastablePair& pair, const ForceField& field, double beta,
                         BoundarySide side, std::size_t n, RngStream& rng) {
  if (side == BoundarySide::gamma_zero) throw_invalid("z_monte_carlo: bad side");
  const int d = pair.dimension();
  // total surface measure: counting measure in 1d, circumference in 2d
  auto surface_measure = [&](const LevelSetRegion& r) {
    if (d == 1) return 2.0;
    if (d == 2) return 2.0 * M_PI * r.radius();
    throw_unsupported("z_monte_carlo supports d in {1, 2} only");
  };
  const double ma = surface_measure(pair.region_a());
  const double mb = surface_measure(pair.region_b());
  const double m_total = ma + mb;
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);

  std::vector<double> vals(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool pick_a = rng.uniform() * m_total < ma;
    const LevelSetRegion& region = pick_a ? pair.region_a() : pair.region_b();
    Vec q = uniform_sphere_point(region, rng);
    const Vec nvec = region.outward_normal(q);
    Vec p(d);
    for (double& x : p) x = inv_sqrt_beta * rng.normal();
    const double pn = dot(p, nvec);
    const bool on_side = side == BoundarySide::gamma_plus ? pn > 0.0 : pn < 0.0;
    vals[k] = on_side ? m_total * std::abs(pn) *
                            std::exp(-beta * field.potential_energy(q))
                      : 0.0;
  }
  return mean_stderr(vals);
}

}  // namespace hillgate
