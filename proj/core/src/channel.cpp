#include "vecsim/channel.hpp"

#include <cmath>
#include <string>

#include "vecsim/error.hpp"

namespace vecsim {

std::string_view to_string(BandwidthPolicy policy) {
  return policy == BandwidthPolicy::Fixed ? "fixed" : "shared";
}

BandwidthPolicy parse_bandwidth_policy(std::string_view text) {
  if (text == "fixed") return BandwidthPolicy::Fixed;
  if (text == "shared") return BandwidthPolicy::Shared;
  throw ConfigError("unknown bandwidth policy '" + std::string(text) + "'");
}

double shannon_rate(const RadioParams& radio, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
  return bandwidth_hz * std::log2(1.0 + radio.snr());
}

double allocate_bandwidth(BandwidthPolicy policy, std::size_t cohort_size,
                          const RadioParams& radio) {
  if (cohort_size == 0) throw DomainError("cohort size must be at least 1");
  const double full = radio.effective_bandwidth_hz();
  if (policy == BandwidthPolicy::Fixed || cohort_size == 1) return full;
  return full / static_cast<double>(cohort_size);
}

double transmission_time(double size_bits, double rate_bps) {
  if (!(rate_bps > 0.0)) throw DomainError("transmission rate must be positive");
  if (size_bits < 0.0) throw DomainError("payload size must be non-negative");
  return size_bits / rate_bps;
}

RateQuote quote(BandwidthPolicy policy, std::size_t cohort_size, const RadioParams& radio) {
  RateQuote q;
  q.concurrency = cohort_size;
  q.bandwidth_hz = allocate_bandwidth(policy, cohort_size, radio);
  q.rate_bps = shannon_rate(radio, q.bandwidth_hz);
  return q;
}

}  // namespace vecsim
