#include "biphoton/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace biphoton {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void write_metadata(std::ofstream& out, const std::vector<std::string>& metadata) {
  for (const auto& line : metadata) out << "# " << line << "\n";
}

}  // namespace

void write_trace_csv(const std::string& path, const CorrelationTrace& trace,
                     const std::vector<std::string>& metadata) {
  auto out = open_out(path);
  write_metadata(out, metadata);
  out << "delay_ns,value\n";
  for (std::size_t i = 0; i < trace.values.size(); ++i)
    out << format_double(trace.delays_ns[i]) << "," << format_double(trace.values[i]) << "\n";
}

void write_profile_csv(const std::string& path, const SusceptibilityProfile& profile) {
  auto out = open_out(path);
  out << "detuning_mhz,re_chi,im_chi\n";
  for (int i : profile.grid.ascending_order())
    out << format_double(profile.grid.detuning_mhz(i)) << ","
        << format_double(profile.values[i].real()) << ","
        << format_double(profile.values[i].imag()) << "\n";
}

void write_transmission_csv(const std::string& path, const FilterTransmission& t,
                            const std::vector<std::string>& metadata) {
  auto out = open_out(path);
  write_metadata(out, metadata);
  out << "detuning_mhz,re_t,im_t,intensity_transmission\n";
  for (int i : t.grid.ascending_order())
    out << format_double(t.grid.detuning_mhz(i)) << "," << format_double(t.t_values[i].real())
        << "," << format_double(t.t_values[i].imag()) << ","
        << format_double(std::norm(t.t_values[i])) << "\n";
}

void write_kernel_csv(const std::string& path, const FilterTransmission& t) {
  if (t.kernel.size() != t.grid.n_points)
    throw std::invalid_argument("write_kernel_csv: kernel not filled");
  auto out = open_out(path);
  out << "time_ns,re_kernel,im_kernel\n";
  for (int i : t.grid.ascending_order())
    out << format_double(t.grid.time_us(i) * 1e3) << "," << format_double(t.kernel[i].real())
        << "," << format_double(t.kernel[i].imag()) << "\n";
}

void write_spectrum_csv(const std::string& path, const std::vector<double>& freqs_mhz,
                        const std::vector<double>& power,
                        const std::vector<std::string>& metadata) {
  auto out = open_out(path);
  write_metadata(out, metadata);
  out << "freq_mhz,power\n";
  for (std::size_t i = 0; i < freqs_mhz.size(); ++i)
    out << format_double(freqs_mhz[i]) << "," << format_double(power[i]) << "\n";
}

CorrelationTrace read_histogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  CorrelationTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) continue;
    try {
      const double delay = std::stod(a);
      const double counts = std::stod(b);
      trace.delays_ns.push_back(delay);
      trace.values.push_back(counts);
    } catch (const std::exception&) {
      continue;  // header or malformed line
    }
  }
  if (trace.delays_ns.size() < 2)
    throw std::runtime_error("histogram needs at least two rows: " + path);
  trace.bin_ns = trace.delays_ns[1] - trace.delays_ns[0];
  for (std::size_t i = 1; i < trace.delays_ns.size(); ++i) {
    const double step = trace.delays_ns[i] - trace.delays_ns[i - 1];
    if (std::abs(step - trace.bin_ns) > 1e-9 * std::max(1.0, trace.bin_ns))
      throw std::runtime_error("histogram bins are not uniformly spaced: " + path);
  }
  return trace;
}

}  // namespace biphoton
