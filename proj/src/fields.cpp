#include "hillgate/fields.hpp"

#include <cmath>

namespace hillgate {

ForceField ForceField::conservative(PotentialSpec potential, int dimension) {
  if (dimension < 1) throw_invalid("ForceField: dimension must be >= 1");
  switch (potential.kind) {
    case PotentialKind::double_well_1d:
      if (dimension != 1) throw_invalid("double_well_1d requires dimension 1");
      break;
    case PotentialKind::radial_double_well_nd:
      if (static_cast<int>(potential.center1.size()) != dimension ||
          static_cast<int>(potential.center2.size()) != dimension)
        throw_invalid("radial_double_well: center dimension mismatch");
      break;
    case PotentialKind::harmonic:
      if (potential.center1.empty()) potential.center1.assign(dimension, 0.0);
      if (static_cast<int>(potential.center1.size()) != dimension)
        throw_invalid("harmonic: center dimension mismatch");
      break;
  }
  ForceField f;
  f.conservative_ = true;
  f.dimension_ = dimension;
  f.potential_ = std::move(potential);
  return f;
}

ForceField ForceField::custom(ForceFunction force, int dimension) {
  if (dimension < 1) throw_invalid("ForceField: dimension must be >= 1");
  if (!force) throw_invalid("ForceField: null custom force");
  ForceField f;
  f.conservative_ = false;
  f.dimension_ = dimension;
  f.custom_force_ = std::move(force);
  return f;
}

const PotentialSpec& ForceField::potential_spec() const {
  if (!conservative_) throw_unsupported("custom force field has no potential");
  return potential_;
}

void ForceField::check_dim(const Vec& q) const {
  if (static_cast<int>(q.size()) != dimension_)
    throw_usage("point dimension does not match field dimension");
}

double ForceField::potential_energy(const Vec& q) const {
  if (!conservative_) throw_unsupported("potential_energy: non-conservative field");
  check_dim(q);
  switch (potential_.kind) {
    case PotentialKind::double_well_1d: {
      const double s = q[0] * q[0] - potential_.a * potential_.a;
      return potential_.height * s * s;
    }
    case PotentialKind::radial_double_well_nd: {
      double r1 = 0.0, r2 = 0.0;
      for (int i = 0; i < dimension_; ++i) {
        const double d1 = q[i] - potential_.center1[i];
        const double d2 = q[i] - potential_.center2[i];
        r1 += d1 * d1;
        r2 += d2 * d2;
      }
      return potential_.stiffness * r1 * r2;
    }
    case PotentialKind::harmonic: {
      double r = 0.0;
      for (int i = 0; i < dimension_; ++i) {
        const double d = q[i] - potential_.center1[i];
        r += d * d;
      }
      return 0.5 * potential_.stiffness * r;
    }
  }
  throw_numerical("unreachable potential kind");
}

void ForceField::force_into(const Vec& q, Vec& f_out) const {
  check_dim(q);
  if (!all_finite(q)) throw_usage("force: non-finite position");
  f_out.resize(q.size());
  if (!conservative_) {
    custom_force_(q, f_out);
    return;
  }
  switch (potential_.kind) {
    case PotentialKind::double_well_1d: {
      // V'(q) = 4 h q (q^2 - a^2)
      const double s = q[0] * q[0] - potential_.a * potential_.a;
      f_out[0] = -4.0 * potential_.height * q[0] * s;
      return;
    }
    case PotentialKind::radial_double_well_nd: {
      double r1 = 0.0, r2 = 0.0;
      for (int i = 0; i < dimension_; ++i) {
        const double d1 = q[i] - potential_.center1[i];
        const double d2 = q[i] - potential_.center2[i];
        r1 += d1 * d1;
        r2 += d2 * d2;
      }
      for (int i = 0; i < dimension_; ++i) {
        const double d1 = q[i] - potential_.center1[i];
        const double d2 = q[i] - potential_.center2[i];
        f_out[i] = -2.0 * potential_.stiffness * (d1 * r2 + d2 * r1);
      }
      return;
    }
    case PotentialKind::harmonic: {
      for (int i = 0; i < dimension_; ++i)
        f_out[i] = -potential_.stiffness * (q[i] - potential_.center1[i]);
      return;
    }
  }
}

Vec ForceField::force(const Vec& q) const {
  Vec f;
  force_into(q, f);
  return f;
}

double ForceField::hamiltonian(const Vec& q, const Vec& p) const {
  if (!conservative_) throw_unsupported("hamiltonian: non-conservative field");
  if (p.size() != q.size()) throw_usage("hamiltonian: q/p dimension mismatch");
  return potential_energy(q) + 0.5 * norm2(p);
}

double ForceField::gibbs_log_density(const Vec& q, const Vec& p, double beta) const {
  if (!conservative_) throw_unsupported("gibbs_log_density: non-conservative field");
  return -beta * hamiltonian(q, p);
}

}  // namespace hillgate
