#pragma once

// JSON run-configuration: masses, exponents, interaction mode, couplings
// (explicit per-pair arrays or the proportional {A, B, k, k1} shorthand),
// grid size, and tolerance overrides.

#include <stdexcept>
#include <string>

#include "qcc/dynamics.hpp"
#include "qcc/families.hpp"
#include "qcc/shape.hpp"

namespace qcc {

class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct Tolerances {
    double classify_rel = 1e-8;
    double verify_residual = 1e-9;
    double verify_periodicity = 1e-6;
    double integrate_rel = 1e-10;
    double integrate_abs = 1e-12;
};

struct RunConfig {
    MassTriple masses;
    ExponentPair exps;
    InteractionMode mode = InteractionMode::AttractiveRepulsive;
    PairCouplings couplings;
    int grid = 2000;
    Tolerances tol;

    System system() const { return {masses, couplings, exps, mode}; }
    ShapeSet shape_set() const { return build_shapes(masses, couplings, exps, mode); }
    FamilyContext family_context() const { return {shape_set(), masses}; }
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

} // namespace qcc
