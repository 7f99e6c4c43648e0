// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "../core/math.hpp"

namespace waveray {

/// Balance heuristic between two sampling strategies. Delta strategies are
/// unmatchable: pass 0 for the competing density and the weight is one.
inline Float mis_weight(Float pdf_a, Float pdf_b) {
    if (pdf_a < 0 || pdf_b < 0) throw std::invalid_argument("mis_weight: negative density");
    if (pdf_a == 0 && pdf_b == 0) throw std::invalid_argument("mis_weight: both densities zero");
    return pdf_a / (pdf_a + pdf_b);
}

} // namespace waveray
