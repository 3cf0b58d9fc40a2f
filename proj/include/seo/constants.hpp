#pragma once

#include <numbers>

namespace seo {

inline constexpr double kBoltzmann = 1.380649e-23;     // J/K, exact SI value
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr const char* kLibraryVersion = "1.0.0";

}  // namespace seo
