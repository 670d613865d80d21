#include "qtraj/potential.hpp"

#include "qtraj/errors.hpp"

#include <cmath>

namespace qtraj {

PotentialSpec PotentialSpec::free() { return {}; }

PotentialSpec PotentialSpec::harmonic(double omega, double mass) {
    if (!(omega > 0.0)) throw ParameterError("harmonic potential: omega must be positive");
    if (!(mass > 0.0)) throw ParameterError("harmonic potential: mass must be positive");
    PotentialSpec p;
    p.kind_ = Kind::harmonic;
    p.omega_ = omega;
    p.mass_ = mass;
    return p;
}

PotentialSpec PotentialSpec::tabulated(GridSpec grid, std::vector<double> samples) {
    if (samples.size() != grid.size()) {
        throw ShapeError("tabulated potential: one sample per grid point required");
    }
    for (double s : samples) {
        if (!std::isfinite(s)) throw ParameterError("tabulated potential: samples must be finite");
    }
    PotentialSpec p;
    p.kind_ = Kind::tabulated;
    p.table_grid_ = grid;
    p.samples_ = samples;
    p.interp_ = std::make_shared<const CubicHermite>(grid.points(), std::move(samples));
    return p;
}

std::string PotentialSpec::kind_name() const {
    switch (kind_) {
        case Kind::free: return "free";
        case Kind::harmonic: return "harmonic";
        case Kind::tabulated: return "tabulated";
    }
    return "unknown";
}

double PotentialSpec::value(double x) const {
    switch (kind_) {
        case Kind::free: return 0.0;
        case Kind::harmonic: return 0.5 * mass_ * omega_ * omega_ * x * x;
        case Kind::tabulated:
            if (!interp_->in_range(x)) throw DomainError("tabulated potential evaluated off its grid");
            return (*interp_)(x);
    }
    return 0.0;
}

double PotentialSpec::gradient(double x) const {
    switch (kind_) {
        case Kind::free: return 0.0;
        case Kind::harmonic: return mass_ * omega_ * omega_ * x;
        case Kind::tabulated:
            if (!interp_->in_range(x)) throw DomainError("tabulated potential evaluated off its grid");
            return interp_->derivative(x);
    }
    return 0.0;
}

std::vector<double> PotentialSpec::sample(const GridSpec& grid) const {
    if (kind_ == Kind::tabulated && grid == table_grid_) return samples_;
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = value(grid.x(i));
    return out;
}

}  // namespace qtraj
