#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qdesign/noise.hpp"
#include "qdesign/quantizer.hpp"

namespace qdesign {

// Noise: "gg:beta=<b>,sigma=<s>" (sigma is the standard deviation) or
// "pointmass". "gaussian:sigma=<s>" and "laplacian:sigma=<s>" are shorthands.
// Throws Error{kParse} on malformed text and Error{kInvalidParameter} on
// out-of-range values.
NoiseDensity parse_noise(std::string_view text);

// Shape only, for sweeps and dither families: "gg:beta=<b>", "gaussian" or
// "laplacian". A sigma, if present, is returned too.
struct FamilySpec {
  double beta = 2.0;
  std::optional<double> sigma;
};
FamilySpec parse_family(std::string_view text);

// "threshold", "sine", "dither:family=<family>,sigma=<s>" or
// "aupl:file=<path>". The dither family defaults to the shape of `ambient`.
Quantizer parse_quantizer(std::string_view text, const NoiseDensity& ambient);

std::string describe(const NoiseDensity& d);

}  // namespace qdesign
