#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slads/image.hpp"

namespace slads::synth {

/// Piecewise-constant discs and ellipses on a flat background.
GroundTruthImage blobs(Dims dims, std::uint64_t seed);

/// Voronoi cells with independent random intensities (polycrystal-like).
GroundTruthImage grains(Dims dims, std::uint64_t seed);

/// Superposed sinusoidal gratings with random orientation and period.
GroundTruthImage waves(Dims dims, std::uint64_t seed);

/// Mixed scene: smooth gradient, hard-edged shapes, a striped region and
/// a grainy region. Stands in for a generic natural test image.
GroundTruthImage generic(Dims dims, std::uint64_t seed);

std::vector<std::string> family_names();
/// Throws ContractError for an unknown family.
GroundTruthImage generate(const std::string& family, Dims dims, std::uint64_t seed);

}  // namespace slads::synth
