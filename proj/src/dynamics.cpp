#include "qcc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcc {

double pair_force_deriv(const System& sys, int pair, double r) {
    const double alpha = sys.exps.attractive;
    const double beta = sys.exps.repulsive;
    const double attract = alpha * sys.couplings.A[pair] * std::pow(r, -alpha - 1.0);
    const double second = beta * sys.couplings.B[pair] * std::pow(r, -beta - 1.0);
    return sys.mode == InteractionMode::AttractiveRepulsive ? attract - second : attract + second;
}

double pair_potential(const System& sys, int pair, double r) {
    const double attract = -sys.couplings.A[pair] * std::pow(r, -sys.exps.attractive);
    const double second = sys.couplings.B[pair] * std::pow(r, -sys.exps.repulsive);
    return sys.mode == InteractionMode::AttractiveRepulsive ? attract + second : attract - second;
}

PlanarState embed(const ConfigTriple& config, const MassTriple& masses) {
    const TriangleStatus st = config.status();
    if (st != TriangleStatus::NonDegenerate) {
        std::ostringstream msg;
        msg << "embed: configuration (" << config.r12 << ", " << config.r13 << ", " << config.r23
            << ") is " << to_string(st) << "; triangle slacks: r13+r23-r12="
            << config.r13 + config.r23 - config.r12 << ", r12+r23-r13="
            << config.r12 + config.r23 - config.r13 << ", r12+r13-r23="
            << config.r12 + config.r13 - config.r23;
        throw std::invalid_argument(msg.str());
    }

    PlanarState state;
    state.pos[0] = {0.0, 0.0};
    state.pos[1] = {config.r12, 0.0};
    const double x3 =
        (config.r12 * config.r12 + config.r13 * config.r13 - config.r23 * config.r23) /
        (2.0 * config.r12);
    const double y3sq = config.r13 * config.r13 - x3 * x3;
    state.pos[2] = {x3, std::sqrt(std::fmax(y3sq, 0.0))};

    const Vec2 com = center_of_mass(state.pos, masses);
    for (auto& p : state.pos) p = p - com;
    return state;
}

Vec2 center_of_mass(const std::array<Vec2, 3>& pos, const MassTriple& masses) {
    Vec2 com;
    for (int i = 0; i < 3; ++i) com = com + pos[i] * masses[i];
    return com * (1.0 / masses.total());
}

std::array<Vec2, 3> grad_potential(const std::array<Vec2, 3>& pos, const System& sys) {
    std::array<Vec2, 3> grad{};
    for (int pair = 0; pair < 3; ++pair) {
        const auto [i, j] = kPairBodies[pair];
        const Vec2 d = pos[i] - pos[j];
        const double r = d.norm();
        if (r < 1e-13) {
            std::ostringstream msg;
            msg << "grad_potential: bodies " << i + 1 << " and " << j + 1
                << " are coincident (r=" << r << ")";
            throw numerical_error(msg.str());
        }
        // grad_i w(r_ij) = w'(r) * (q_i - q_j)/r; the pair pulls together
        // when w' > 0 under m q'' = -grad U.
        const Vec2 g = d * (pair_force_deriv(sys, pair, r) / r);
        grad[i] = grad[i] + g;
        grad[j] = grad[j] - g;
    }
    return grad;
}

double potential_energy(const std::array<Vec2, 3>& pos, const System& sys) {
    double u = 0.0;
    for (int pair = 0; pair < 3; ++pair) {
        const auto [i, j] = kPairBodies[pair];
        u += pair_potential(sys, pair, (pos[i] - pos[j]).norm());
    }
    return u;
}

double kinetic_energy(const PlanarState& state, const MassTriple& masses) {
    double t = 0.0;
    for (int i = 0; i < 3; ++i) t += 0.5 * masses[i] * state.vel[i].dot(state.vel[i]);
    return t;
}

double total_energy(const PlanarState& state, const System& sys) {
    return kinetic_energy(state, sys.masses) + potential_energy(state.pos, sys);
}

double angular_momentum(const PlanarState& state, const MassTriple& masses) {
    double l = 0.0;
    for (int i = 0; i < 3; ++i)
        l += masses[i] * (state.pos[i].x * state.vel[i].y - state.pos[i].y * state.vel[i].x);
    return l;
}

double cc_residual(const PlanarState& state, const System& sys, double omega_sq,
                   ResidualForm form) {
    const auto grad = grad_potential(state.pos, sys);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double weight = form == ResidualForm::MassWeighted ? sys.masses[i] : 1.0;
        const Vec2 target = state.pos[i] * (omega_sq * weight);
        const double err = (grad[i] - target).norm() / (1.0 + target.norm());
        worst = std::fmax(worst, err);
    }
    return worst;
}

PlanarState rigid_rotation_state(const PlanarState& state, double omega) {
    PlanarState out = state;
    for (int i = 0; i < 3; ++i)
        out.vel[i] = {-omega * state.pos[i].y, omega * state.pos[i].x};
    return out;
}

namespace {

using State12 = std::array<double, 12>;

State12 pack(const PlanarState& s) {
    State12 y{};
    for (int i = 0; i < 3; ++i) {
        y[2 * i] = s.pos[i].x;
        y[2 * i + 1] = s.pos[i].y;
        y[6 + 2 * i] = s.vel[i].x;
        y[6 + 2 * i + 1] = s.vel[i].y;
    }
    return y;
}

PlanarState unpack(const State12& y) {
    PlanarState s;
    for (int i = 0; i < 3; ++i) {
        s.pos[i] = {y[2 * i], y[2 * i + 1]};
        s.vel[i] = {y[6 + 2 * i], y[6 + 2 * i + 1]};
    }
    return s;
}

State12 rhs(const State12& y, const System& sys) {
    const PlanarState s = unpack(y);
    const auto grad = grad_potential(s.pos, sys);
    State12 dy{};
    for (int i = 0; i < 3; ++i) {
        dy[2 * i] = s.vel[i].x;
        dy[2 * i + 1] = s.vel[i].y;
        dy[6 + 2 * i] = -grad[i].x / sys.masses[i];
        dy[6 + 2 * i + 1] = -grad[i].y / sys.masses[i];
    }
    return dy;
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

double initial_step(const State12& y, const State12& f0, const System& sys, double t_end,
                    double rel_tol, double abs_tol) {
    double dn0 = 0.0, dn1 = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double sc = abs_tol + rel_tol * std::fabs(y[i]);
        dn0 += (y[i] / sc) * (y[i] / sc);
        dn1 += (f0[i] / sc) * (f0[i] / sc);
    }
    double h = (dn0 < 1e-10 || dn1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(dn0 / dn1);
    h = std::fmin(h, t_end);

    State12 y1;
    for (int i = 0; i < 12; ++i) y1[i] = y[i] + h * f0[i];
    const State12 f1 = rhs(y1, sys);
    double dn2 = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double sc = abs_tol + rel_tol * std::fabs(y[i]);
        const double d = (f1[i] - f0[i]) / sc;
        dn2 += d * d;
    }
    const double der2 = std::sqrt(dn2) / h;
    const double der = std::fmax(std::sqrt(dn1), der2);
    const double h1 = der > 1e-15 ? std::pow(0.01 / der, 0.2) : std::fmax(1e-6, h * 1e-3);
    return std::fmin(std::fmin(100.0 * h, h1), t_end);
}

} // namespace

PlanarState Trajectory::state_at(double t) const {
    if (times_.empty()) throw std::invalid_argument("state_at: empty trajectory");
    const double t0 = times_.front();
    const double t1 = times_.back();
    const double slack = 1e-12 * std::fmax(1.0, std::fabs(t1));
    if (t < t0 - slack || t > t1 + slack)
        throw std::invalid_argument("state_at: time outside the integrated span");
    if (t <= t0) return states_.front();
    if (t >= t1) return states_.back();

    // blocks_[k] covers [times_[k], times_[k+1]].
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times_.begin());
    k = (k == 0) ? 0 : k - 1;
    if (k >= blocks_.size()) k = blocks_.size() - 1;
    const DenseBlock& b = blocks_[k];
    const double theta = (t - b.t0) / b.h;
    const double theta1 = 1.0 - theta;

    State12 y;
    for (int i = 0; i < 12; ++i) {
        y[i] = b.rcont[0][i] +
               theta * (b.rcont[1][i] +
                        theta1 * (b.rcont[2][i] +
                                  theta * (b.rcont[3][i] + theta1 * b.rcont[4][i])));
    }
    return unpack(y);
}

Trajectory integrate(const PlanarState& initial, const System& sys, double t_end,
                     const IntegrateOptions& opt) {
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");

    Trajectory traj;
    State12 y = pack(initial);
    double t = 0.0;

    State12 k1 = rhs(y, sys);
    double h = initial_step(y, k1, sys, t_end, opt.rel_tol, opt.abs_tol);

    traj.times_.push_back(0.0);
    traj.states_.push_back(initial);

    State12 k2, k3, k4, k5, k6, k7, ynew, ytmp;
    bool just_rejected = false;

    while (t < t_end) {
        if (traj.stats_.steps + traj.stats_.rejected > opt.max_steps)
            throw numerical_error("integrate: step budget exhausted");
        if (h < 1e-14 * std::fmax(1.0, std::fabs(t))) {
            std::ostringstream msg;
            msg << "integrate: step size underflow (near-collision) at t=" << t;
            throw numerical_error(msg.str());
        }
        if (t + h > t_end) h = t_end - t;

        for (int i = 0; i < 12; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(ytmp, sys);
        for (int i = 0; i < 12; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(ytmp, sys);
        for (int i = 0; i < 12; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(ytmp, sys);
        for (int i = 0; i < 12; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(ytmp, sys);
        for (int i = 0; i < 12; ++i)
            ytmp[i] =
                y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(ytmp, sys);
        for (int i = 0; i < 12; ++i)
            ynew[i] =
                y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = rhs(ynew, sys);

        double err_acc = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * k7[i]);
            const double sc =
                opt.abs_tol + opt.rel_tol * std::fmax(std::fabs(y[i]), std::fabs(ynew[i]));
            err_acc += (e / sc) * (e / sc);
        }
        const double err = std::sqrt(err_acc / 12.0);

        if (err <= 1.0) {
            Trajectory::DenseBlock block;
            block.t0 = t;
            block.h = h;
            for (int i = 0; i < 12; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                block.rcont[0][i] = y[i];
                block.rcont[1][i] = ydiff;
                block.rcont[2][i] = bspl;
                block.rcont[3][i] = ydiff - h * k7[i] - bspl;
                block.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                         d6 * k6[i] + d7 * k7[i]);
            }
            traj.blocks_.push_back(block);

            t += h;
            y = ynew;
            k1 = k7; // first-same-as-last
            traj.times_.push_back(t);
            const PlanarState st = unpack(y);
            traj.states_.push_back(st);
            traj.stats_.steps += 1;
            traj.stats_.max_com_drift =
                std::fmax(traj.stats_.max_com_drift, center_of_mass(st.pos, sys.masses).norm() *
                                                          sys.masses.total());

            const double facmax = just_rejected ? 1.0 : 5.0;
            const double fac =
                std::clamp(0.9 * std::pow(std::fmax(err, 1e-10), -0.2), 0.2, facmax);
            h *= fac;
            just_rejected = false;
        } else {
            traj.stats_.rejected += 1;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            just_rejected = true;
        }
    }
    return traj;
}

PeriodicityError periodicity_error(const Trajectory& traj, double period) {
    if (!(period > 0.0)) throw std::invalid_argument("periodicity_error: period must be positive");
    if (traj.t_end() < period * (1.0 - 1e-12))
        throw std::invalid_argument("periodicity_error: trajectory shorter than the period");

    const PlanarState start = traj.states().front();
    const PlanarState end = traj.state_at(period);
    PeriodicityError err;
    for (int i = 0; i < 3; ++i) {
        err.position = std::fmax(err.position, (end.pos[i] - start.pos[i]).norm());
        err.velocity = std::fmax(err.velocity, (end.vel[i] - start.vel[i]).norm());
    }
    return err;
}

} // namespace qcc
