#include "qrob/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrob {

double bicubic_kernel(double t) {
    constexpr double a = -0.5;
    const double x = std::abs(t);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
    return 0.0;
}

namespace {

// One-dimensional pass mapping length `sn` to `dn` along the x axis of an
// h x sn image.
std::vector<double> pass_x(const std::vector<double>& src, int sn, int h, int dn) {
    std::vector<double> dst(std::size_t(h) * dn);
    const double scale = static_cast<double>(sn) / dn;
    for (int dx = 0; dx < dn; ++dx) {
        const double sx = (dx + 0.5) * scale - 0.5;
        const int base = static_cast<int>(std::floor(sx));
        double w[4];
        for (int k = 0; k < 4; ++k) w[k] = bicubic_kernel(sx - (base - 1 + k));
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                const int xx = std::clamp(base - 1 + k, 0, sn - 1);
                acc += w[k] * src[std::size_t(y) * sn + xx];
            }
            dst[std::size_t(y) * dn + dx] = acc;
        }
    }
    return dst;
}

std::vector<double> transpose(const std::vector<double>& src, int w, int h) {
    std::vector<double> out(src.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out[std::size_t(x) * h + y] = src[std::size_t(y) * w + x];
    return out;
}

}  // namespace

std::vector<double> resize_bicubic(const std::vector<double>& src, int src_w,
                                   int src_h, int dst_w, int dst_h) {
    if (src_w < 1 || src_h < 1 || dst_w < 1 || dst_h < 1)
        throw std::invalid_argument("resize_bicubic: bad dimensions");
    if (src.size() != std::size_t(src_w) * src_h)
        throw std::invalid_argument("resize_bicubic: buffer size mismatch");
    // Horizontal pass, then the vertical one as a horizontal pass on the
    // transpose. Separability is exact for a product kernel.
    const std::vector<double> hpass = pass_x(src, src_w, src_h, dst_w);
    const std::vector<double> t = transpose(hpass, dst_w, src_h);
    const std::vector<double> vpass = pass_x(t, src_h, dst_w, dst_h);
    return transpose(vpass, dst_h, dst_w);
}

std::vector<double> central_window(const std::vector<double>& img, int size,
                                   int window) {
    if (window > size || window < 1)
        throw std::invalid_argument("central_window: window must fit in image");
    if (img.size() != std::size_t(size) * size)
        throw std::invalid_argument("central_window: buffer size mismatch");
    const int off = (size - window) / 2;
    std::vector<double> out(std::size_t(window) * window);
    for (int y = 0; y < window; ++y)
        for (int x = 0; x < window; ++x)
            out[std::size_t(y) * window + x] = img[std::size_t(y + off) * size + (x + off)];
    return out;
}

}  // namespace qrob
