/// Seeded band-limited random fields and gauge maps.
#pragma once

#include <cstdint>

#include "gaugelab/gauge.hpp"

namespace gaugelab {

struct SmoothFieldSpec {
    int max_mode = 1;         ///< wavevector components range over [-max_mode, max_mode]
    double amplitude = 0.5;   ///< rms-like scale of the resulting field
    bool include_constant = false;
    bool axis_only = false;   ///< keep only wavevectors with a single nonzero component
};

/// Sum of random Fourier modes exp(2 pi i k.x / L) with Su2 coefficients, one draw per component.
Su2Form random_smooth_form(const Grid& g, int degree, std::uint64_t seed, const SmoothFieldSpec& spec = {});

ScalarField random_smooth_scalar(const Grid& g, std::uint64_t seed, const SmoothFieldSpec& spec = {});

/// g(x) = exp(xi(x)) for a random smooth Su2 0-form xi.
GaugeMap random_gauge_map(const Grid& g, std::uint64_t seed, double amplitude, int max_mode = 1);

/// Random smooth pair with both fields drawn from the same spec.
GaugePair random_smooth_pair(const Grid& g, std::uint64_t seed, const SmoothFieldSpec& spec = {}, double r = 1.0);

}  // namespace gaugelab
