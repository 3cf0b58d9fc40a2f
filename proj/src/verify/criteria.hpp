#pragma once

#include "seo/verify.hpp"

namespace seo::verify {

// Numbered acceptance criteria. `fast` shortens the statistical runs of 6
// and 7 and widens their tolerances; the acceptance binary never sets it.
CheckResult tongue_geometry(const VerifyOptions& o);        // 1
CheckResult sideband_comb(const VerifyOptions& o);          // 2
CheckResult winding_rate(const VerifyOptions& o);           // 3
CheckResult square_root_law(const VerifyOptions& o);        // 4
CheckResult fractional_plateaus(const VerifyOptions& o);    // 5
CheckResult locked_phase_noise(const VerifyOptions& o);     // 6
CheckResult sensitivity_chain(const VerifyOptions& o);      // 7
CheckResult envelope_consistency(const VerifyOptions& o);   // 8
CheckResult hopf_threshold(const VerifyOptions& o);         // 9
CheckResult static_formulas(const VerifyOptions& o);        // 10

class Report;
// Pieces of 7 reused by the analytic and monte-carlo suites.
void identity_items(Report& rep, std::uint64_t seed);
void degradation_items(Report& rep, const VerifyOptions& o);

}  // namespace seo::verify
