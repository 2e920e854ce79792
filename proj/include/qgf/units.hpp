#pragma once

namespace qgf {

inline constexpr double kHartreeToEv = 27.211386245988;

constexpr double ha_to_ev(double e) { return e * kHartreeToEv; }
constexpr double ev_to_ha(double e) { return e / kHartreeToEv; }

}  // namespace qgf
