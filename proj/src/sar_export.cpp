#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mimosar/sar.hpp"

namespace mimosar {

void write_pgm(std::ostream& out, const SarImage& image) {
  double peak = 0.0;
  for (const auto& p : image.pixels()) peak = std::max(peak, std::abs(p));
  out << "P5\n" << image.nx() << ' ' << image.ny() << "\n255\n";
  // Top row is the far edge (largest y).
  for (std::size_t row = 0; row < image.ny(); ++row) {
    const std::size_t iy = image.ny() - 1 - row;
    for (std::size_t ix = 0; ix < image.nx(); ++ix) {
      const double v = peak > 0.0 ? std::abs(image.at(ix, iy)) / peak : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
    }
  }
}

void write_image_csv(std::ostream& out, const SarImage& image) {
  out << "kx,ky,re,im\n";
  char line[160];
  for (std::size_t iy = 0; iy < image.ny(); ++iy) {
    for (std::size_t ix = 0; ix < image.nx(); ++ix) {
      if (!image.active(ix, iy)) continue;
      const cplx v = image.at(ix, iy);
      std::snprintf(line, sizeof line, "%ld,%ld,%.17g,%.17g\n", image.kx0() + static_cast<long>(ix),
                    image.ky0() + static_cast<long>(iy), v.real(), v.imag());
      out << line;
    }
  }
}

void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void append_flops(std::vector<std::pair<std::string, std::string>>& kv, const std::string& prefix,
                  const FlopTally& f) {
  kv.emplace_back(prefix + ".range_fft", std::to_string(f.range_fft));
  kv.emplace_back(prefix + ".velocity_fft", std::to_string(f.velocity_fft));
  kv.emplace_back(prefix + ".angle_fft", std::to_string(f.angle_fft));
  kv.emplace_back(prefix + ".tdm_compensation", std::to_string(f.tdm_compensation));
  kv.emplace_back(prefix + ".detection", std::to_string(f.detection));
  kv.emplace_back(prefix + ".backprojection", std::to_string(f.backprojection));
  kv.emplace_back(prefix + ".imaging_other", std::to_string(f.imaging_other));
  kv.emplace_back(prefix + ".total", std::to_string(f.total()));
}

}  // namespace mimosar
