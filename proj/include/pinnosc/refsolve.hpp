#pragma once

#include <span>

#include "pinnosc/grid.hpp"
#include "pinnosc/pde.hpp"

namespace pinnosc {

struct SolverParams {
    int modes = 512;       // Fourier collocation points (power of two)
    double dt_max = 1e-4;  // internal step upper bound; steps divide output gaps exactly
};

/// High-accuracy reference solutions sampled onto the requested grid by
/// trigonometric interpolation in space; requested times must be ascending and
/// nonnegative (the t = 0 row, when requested, is the exact initial condition).
/// Requested xs outside the spatial domain raise ArgumentError.

/// Viscous Burgers u_t + u u_x = nu u_xx on [-1,1], u(±1)=0, via the odd
/// periodic extension (the IC -sin(pi x) is odd, and oddness is preserved),
/// integrating-factor RK4 in time.
GridSolution solve_burgers(double nu, std::span<const double> xs,
                           std::span<const double> times, SolverParams params = {});

/// Allen-Cahn with periodic conditions; ETDRK4 for the stiff linear part.
GridSolution solve_allen_cahn(std::span<const double> xs, std::span<const double> times,
                              SolverParams params = {});

/// Focusing nonlinear Schrodinger on [-5,5] periodic, split-step Fourier
/// (Strang); two channels (Re, Im).
GridSolution solve_schrodinger(std::span<const double> xs, std::span<const double> times,
                               SolverParams params = {});

/// Euler-Bernoulli beam: closed-form sin(x) cos(4 pi t).
GridSolution solve_beam(std::span<const double> xs, std::span<const double> times);

/// Dispatch on spec.name (burgers/burgers_parametric use spec.nu).
GridSolution solve_reference(const PdeSpec& spec, const DomainSpec& domain,
                             std::span<const double> xs, std::span<const double> times,
                             SolverParams params = {});

}  // namespace pinnosc
