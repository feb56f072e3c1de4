#pragma once

// Collinear central configurations: multistart damped-Newton solves of the
// on-line condition grad_i U = omega^2 m_i s_i for the two gaps, per body
// ordering modulo reflection.

#include <array>
#include <vector>

#include "qcc/dynamics.hpp"
#include "qcc/types.hpp"

namespace qcc {

struct LineConfig {
    std::array<double, 3> s{};        // signed positions, mass-weighted centroid zero
    std::array<int, 3> ordering{};    // body indices left to right
    double gap1 = 0.0;                // distance between left and middle body
    double gap2 = 0.0;                // distance between middle and right body
    double residual = 0.0;            // normalized on-line residual
    bool fold_flag = false;           // near-singular Jacobian (double root)
};

// The three orderings modulo reflection, keyed by the middle body.
std::array<std::array<int, 3>, 3> collinear_orderings();

std::vector<LineConfig> solve_collinear(const std::array<int, 3>& ordering, const System& sys,
                                        double omega_sq, int multistart_count = 16);

struct CollinearCount {
    struct PerOrdering {
        std::array<int, 3> ordering{};
        std::vector<LineConfig> solutions;
    };
    std::vector<PerOrdering> orderings;
    int total = 0;
};

CollinearCount count_collinear(const System& sys, double omega_sq, int multistart_count = 16);

// Embeds a line configuration on the x-axis as a planar state (zero
// velocities) for cross-checks against the planar residual.
PlanarState embed_on_line(const LineConfig& line, const MassTriple& masses);

} // namespace qcc
