#pragma once

#include <string>
#include <vector>

#include "biphoton/filter.hpp"
#include "biphoton/pair.hpp"
#include "biphoton/response.hpp"

namespace biphoton {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Trace CSV `delay_ns, value` with `#`-prefixed metadata lines in front.
void write_trace_csv(const std::string& path, const CorrelationTrace& trace,
                     const std::vector<std::string>& metadata);

/// Susceptibility CSV `detuning_mhz, re_chi, im_chi` in ascending detuning order.
void write_profile_csv(const std::string& path, const SusceptibilityProfile& profile);

/// Transmission CSV `detuning_mhz, re_t, im_t, intensity_transmission`.
void write_transmission_csv(const std::string& path, const FilterTransmission& t,
                            const std::vector<std::string>& metadata);

/// Kernel CSV `time_ns, re_kernel, im_kernel` (kernel must be filled).
void write_kernel_csv(const std::string& path, const FilterTransmission& t);

/// Spectrum CSV `freq_mhz, power`.
void write_spectrum_csv(const std::string& path, const std::vector<double>& freqs_mhz,
                        const std::vector<double>& power,
                        const std::vector<std::string>& metadata);

/// Histogram ingestion `delay_ns, counts` (header line optional); bins must
/// be uniformly spaced.
CorrelationTrace read_histogram_csv(const std::string& path);

}  // namespace biphoton
