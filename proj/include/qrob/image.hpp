#pragma once

#include <vector>

namespace qrob {

// Keys cubic convolution kernel with a = -0.5 (the common "bicubic" choice).
// Support is |t| < 2 and the weights of the four taps sum to 1 at any phase,
// so constant images are reproduced exactly.
double bicubic_kernel(double t);

// Separable bicubic resize with centre-aligned sampling and clamped borders.
// Images are row-major; values are not clamped here (cubic overshoot is the
// caller's business).
std::vector<double> resize_bicubic(const std::vector<double>& src, int src_w,
                                   int src_h, int dst_w, int dst_h);

// Central window x window crop of a size x size row-major image, offset
// (size - window) / 2 on both axes.
std::vector<double> central_window(const std::vector<double>& img, int size,
                                   int window);

}  // namespace qrob
