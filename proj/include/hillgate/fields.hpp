#pragma once

#include <functional>
#include <string>

#include "hillgate/errors.hpp"
#include "hillgate/vec.hpp"

namespace hillgate {

// Friction and inverse temperature of the dynamics.
struct ThermoParams {
  double gamma = 1.0;
  double beta = 1.0;

  void validate() const {
    if (!(gamma > 0.0)) throw_invalid("ThermoParams: gamma must be > 0");
    if (!(beta > 0.0)) throw_invalid("ThermoParams: beta must be > 0");
  }
};

enum class PotentialKind { double_well_1d, radial_double_well_nd, harmonic };

// Built-in polynomial potentials; gradients are exact closed forms.
//   double_well_1d:        V(q) = height * (q^2 - a^2)^2            (d = 1)
//   radial_double_well_nd: V(q) = stiffness * |q-c1|^2 * |q-c2|^2
//   harmonic:              V(q) = (stiffness/2) * |q-c|^2
struct PotentialSpec {
  PotentialKind kind = PotentialKind::double_well_1d;
  double a = 1.0;
  double height = 1.0;
  double stiffness = 1.0;
  Vec center1;
  Vec center2;

  static PotentialSpec double_well_1d(double a, double height) {
    PotentialSpec s;
    s.kind = PotentialKind::double_well_1d;
    s.a = a;
    s.height = height;
    return s;
  }
  static PotentialSpec radial_double_well(Vec c1, Vec c2, double stiffness) {
    PotentialSpec s;
    s.kind = PotentialKind::radial_double_well_nd;
    s.center1 = std::move(c1);
    s.center2 = std::move(c2);
    s.stiffness = stiffness;
    return s;
  }
  static PotentialSpec harmonic(Vec center, double stiffness) {
    PotentialSpec s;
    s.kind = PotentialKind::harmonic;
    s.center1 = std::move(center);
    s.stiffness = stiffness;
    return s;
  }
};

using ForceFunction = std::function<void(const Vec& q, Vec& f_out)>;

// A force field on R^d. Conservative fields carry a built-in potential with
// exact energies and gradients; custom fields only provide F and are flagged
// unvalidated (no Hamiltonian, no boundary-measure machinery).
class ForceField {
 public:
  static ForceField conservative(PotentialSpec potential, int dimension);
  static ForceField custom(ForceFunction force, int dimension);

  int dimension() const noexcept { return dimension_; }
  bool is_conservative() const noexcept { return conservative_; }
  const PotentialSpec& potential_spec() const;

  // F(q); equals -grad V(q) for conservative fields.
  void force_into(const Vec& q, Vec& f_out) const;
  Vec force(const Vec& q) const;

  double potential_energy(const Vec& q) const;

  // H(q, p) = V(q) + |p|^2 / 2
  double hamiltonian(const Vec& q, const Vec& p) const;

  // Unnormalized log-density of the Boltzmann-Gibbs measure: -beta * H(q, p).
  double gibbs_log_density(const Vec& q, const Vec& p, double beta) const;

 private:
  ForceField() = default;
  void check_dim(const Vec& q) const;

  bool conservative_ = true;
  int dimension_ = 1;
  PotentialSpec potential_;
  ForceFunction custom_force_;
};

}  // namespace hillgate
