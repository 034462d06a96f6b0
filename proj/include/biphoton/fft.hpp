#pragma once

#include <unsupported/Eigen/FFT>

#include "biphoton/common.hpp"

namespace biphoton {

/// Inverse DFT, 1/N scaling: x_n = (1/N) sum_k X_k exp(+2*pi*i*k*n/N).
inline ArrayXcd ifft(const ArrayXcd& freq) {
  Eigen::FFT<double> fft;
  VectorXcd in = freq.matrix();
  VectorXcd out(in.size());
  fft.inv(out, in);
  return out.array();
}

/// Forward DFT, no scaling: X_k = sum_n x_n exp(-2*pi*i*k*n/N).
inline ArrayXcd fft_forward(const ArrayXcd& time) {
  Eigen::FFT<double> fft;
  VectorXcd in = time.matrix();
  VectorXcd out(in.size());
  fft.fwd(out, in);
  return out.array();
}

}  // namespace biphoton
