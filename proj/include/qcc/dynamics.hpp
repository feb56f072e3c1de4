#pragma once

// Planar verification dynamics: embedding of mutual-distance triples,
// Cartesian central-configuration residual, and adaptive Runge-Kutta
// integration of the equations of motion m_i q''_i = -grad_i U.

#include <array>
#include <cstddef>
#include <vector>

#include "qcc/types.hpp"

namespace qcc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

// Physical system: masses plus the pair interaction law. The stored
// potential is the energy whose attractive term drives bodies together, so
// the equations of motion are m_i q''_i = -grad_i U and a rigid rotation at
// angular velocity omega satisfies grad_i U = omega^2 m_i q_i.
struct System {
    MassTriple masses;
    PairCouplings couplings;
    ExponentPair exps;
    InteractionMode mode = InteractionMode::AttractiveRepulsive;
};

// Derivative of the pair potential energy with respect to distance,
// w'(r) = alpha A r^-(alpha+1) -/+ beta B r^-(beta+1). Positive values pull
// the pair together.
double pair_force_deriv(const System& sys, int pair, double r);

// Pair potential energy w(r) = -A r^-alpha +/- B r^-beta.
double pair_potential(const System& sys, int pair, double r);

struct PlanarState {
    std::array<Vec2, 3> pos;
    std::array<Vec2, 3> vel;
};

// Places the triangle with body 1 at the origin frame, body 2 on the x-axis
// and body 3 in the upper half-plane, then recenters so the mass-weighted
// centroid is zero. Velocities are zero.
PlanarState embed(const ConfigTriple& config, const MassTriple& masses);

std::array<Vec2, 3> grad_potential(const std::array<Vec2, 3>& pos, const System& sys);

double potential_energy(const std::array<Vec2, 3>& pos, const System& sys);
double kinetic_energy(const PlanarState& state, const MassTriple& masses);
double total_energy(const PlanarState& state, const System& sys);
double angular_momentum(const PlanarState& state, const MassTriple& masses);
Vec2 center_of_mass(const std::array<Vec2, 3>& pos, const MassTriple& masses);

enum class ResidualForm {
    MassWeighted, // grad_i U = omega^2 m_i q_i (consistent with the centered centroid)
    Literal,      // grad_i U = omega^2 q_i (unit-mass reading; exact only for m_i = 1)
};

// Normalized residual of the central-configuration condition,
// max_i |grad_i U - omega^2 m_i q_i| / (1 + |omega^2 m_i q_i|).
double cc_residual(const PlanarState& state, const System& sys, double omega_sq,
                   ResidualForm form = ResidualForm::MassWeighted);

// Sets v_i = omega * J q_i (quarter turn), the t=0 slice of the uniformly
// rotating solution.
PlanarState rigid_rotation_state(const PlanarState& state, double omega);

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_steps = 10'000'000;
};

struct IntegratorStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double max_com_drift = 0.0; // peak |sum m_i q_i| over accepted steps
};

// Dormand-Prince 5(4) trajectory with per-step dense output.
class Trajectory {
  public:
    struct DenseBlock {
        double t0 = 0.0;
        double h = 0.0;
        std::array<std::array<double, 12>, 5> rcont{};
    };

    const std::vector<double>& times() const { return times_; }
    const std::vector<PlanarState>& states() const { return states_; }
    const IntegratorStats& stats() const { return stats_; }
    double t_end() const { return times_.empty() ? 0.0 : times_.back(); }

    // Dense-output evaluation; t must lie within the integrated span.
    PlanarState state_at(double t) const;

  private:
    friend Trajectory integrate(const PlanarState&, const System&, double,
                                const IntegrateOptions&);
    std::vector<double> times_;
    std::vector<PlanarState> states_;
    std::vector<DenseBlock> blocks_;
    IntegratorStats stats_;
};

Trajectory integrate(const PlanarState& initial, const System& sys, double t_end,
                     const IntegrateOptions& opt = {});

struct PeriodicityError {
    double position = 0.0; // max over bodies |q_i(T) - q_i(0)|
    double velocity = 0.0; // max over bodies |v_i(T) - v_i(0)|
    double total() const { return position + velocity; }
};

PeriodicityError periodicity_error(const Trajectory& traj, double period);

} // namespace qcc
