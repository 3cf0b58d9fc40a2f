#pragma once

#include "seo/design.hpp"

namespace seo::verify {

// Scaled units: omega0 = 1, lambda = 1.
[[nodiscard]] CavityParams unit_cavity();

// Weakly self-excited device deep inside the envelope validity range;
// Gamma0 = -gamma_factor * gamma0.
[[nodiscard]] DesignedDevice consistency_device(double gamma_factor, double beta_share);

// Strongly pumped device whose staircase shows the 1, 1/2 and 1/3 plateaus.
[[nodiscard]] DesignedDevice plateau_device();

}  // namespace seo::verify
