#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Numerical failure modes that callers are expected to catch and report
// with experiment-stage context.

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Marching blow-up, NaN in a time step, and similar instabilities.
struct instability_error : numerical_error {
    using numerical_error::numerical_error;
};

// Internal cross-checks disagree (unitarity defect, Wronskian drift, ...).
// Signals an under-resolved computation rather than a caller mistake.
struct inconsistency_error : numerical_error {
    using numerical_error::numerical_error;
};

// A spectral assumption of the experiment does not hold (wrong number of
// negative eigenvalues, near-pole resolvent, vanishing spectral gap).
struct spectral_error : numerical_error {
    using numerical_error::numerical_error;
};

// Parameter outside the small-|z| / small-data regime where the fixed
// point or Newton iteration is contractive.
struct regime_error : numerical_error {
    using numerical_error::numerical_error;
};

// Fixed point or Newton iteration failed to reach tolerance.
struct convergence_error : numerical_error {
    using numerical_error::numerical_error;
};

// Field carries more than the tolerated energy above the frequency band.
struct band_limit_error : numerical_error {
    using numerical_error::numerical_error;
};

// Time stepping produced NaN/overflow; carries the last healthy time.
struct blow_up_error : numerical_error {
    double last_good_time;
    blow_up_error(const std::string& what, double t)
        : numerical_error(what), last_good_time(t) {}
};

// Radiation reached the edge of the box.
struct boundary_pollution_error : numerical_error {
    double time;
    boundary_pollution_error(const std::string& what, double t)
        : numerical_error(what), time(t) {}
};

} // namespace nlslab
