#pragma once

#include <cstddef>
#include <string_view>

#include "vecsim/scenario.hpp"

namespace vecsim {

/// Fixed: one transmission at a time on the whole effective band.
/// Shared: transmissions that become ready together split the band equally.
enum class BandwidthPolicy { Fixed, Shared };

std::string_view to_string(BandwidthPolicy policy);
BandwidthPolicy parse_bandwidth_policy(std::string_view text);

/// Two instants closer than this are treated as simultaneous.
inline constexpr double kSimultaneityTolerance = 1e-6;

struct RateQuote {
  double bandwidth_hz = 0.0;
  double rate_bps = 0.0;
  std::size_t concurrency = 1;
};

/// bandwidth_hz * log2(1 + p g / n0). Throws DomainError for bandwidth <= 0.
double shannon_rate(const RadioParams& radio, double bandwidth_hz);

/// Per-member bandwidth for a cohort of simultaneous transmissions.
double allocate_bandwidth(BandwidthPolicy policy, std::size_t cohort_size,
                          const RadioParams& radio);

double transmission_time(double size_bits, double rate_bps);

RateQuote quote(BandwidthPolicy policy, std::size_t cohort_size, const RadioParams& radio);

}  // namespace vecsim
