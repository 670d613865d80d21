#pragma once

#include "qtraj/lagrangian.hpp"
#include "qtraj/potential.hpp"
#include "qtraj/state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qtraj {

enum class Picture { wave, trajectory };

struct ObservableReport {
    double mean_x = 0.0;
    double mean_p = 0.0;
    // Standard deviation of x; sets the scale for comparing mean_x.
    double spread_x = 0.0;
    // Flow kinetic energy plus the internal term rho U.
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
    // Not defined for a single coordinate; always empty.
    std::optional<double> angular_momentum;
    Picture picture = Picture::wave;
};

std::string picture_name(Picture p);

// Relative differences between two reports of the same state. Each one is
// taken against the larger magnitude, but never against less than the
// natural scale of the quantity: spread_x for <x>, sqrt(2 m K) for <p>,
// |K| + |V| for the energies. Means that sit at zero would otherwise be
// judged against their own rounding.
struct ObservableGaps {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;

    double largest() const;
};

ObservableGaps observable_gaps(const ObservableReport& a, const ObservableReport& b, double mass);

// Moments from the polar fields with trapezoid quadrature; node-masked
// points contribute nothing. psi must be normalized to within 1e-6.
ObservableReport expectations_wave(const Wavefunction& psi, const PotentialSpec& potential,
                                   const PhysicalConstants& consts, const FieldOptions& opts = {});

// Label-measure sums, with U from the same label-space derivatives that
// drive the force.
ObservableReport expectations_traj(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                                   const LagrangianOptions& opts = {});

/// Outcome of comparing psi with c psi, neither renormalized.
struct VelocityScaleReport {
    double factor = 0.0;  // |c|^2
    // Largest |rho_c - |c|^2 rho| and |j_c - |c|^2 j|, relative to the
    // largest scaled value.
    double density_error = 0.0;
    double current_error = 0.0;
    // Largest |v_c - v| over points unmasked in both.
    double velocity_change = 0.0;
    std::size_t points = 0;

    bool passed(double scale_tol = 1e-12, double velocity_tol = 1e-14) const;
};

// rho and j = (hbar/m) Im(psi* psi') are means of linear operators and
// pick up |c|^2; their ratio v does not change at all.
VelocityScaleReport velocity_scale_check(const Wavefunction& psi, Complex c, const PhysicalConstants& consts,
                                         const FieldOptions& opts = {});

}  // namespace qtraj
