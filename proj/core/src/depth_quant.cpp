// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "cosplan/errors.hpp"
#include "cosplan/evalkit.hpp"

namespace cosplan {

nlohmann::json DepthQuantReport::to_json() const {
  return {{"bits", bits},
          {"unique_values", unique_values},
          {"step_cm", step_cm},
          {"max_err_cm", max_err_cm},
          {"mean_err_cm", mean_err_cm},
          {"rmse_cm", rmse_cm},
          {"psnr_db", std::isfinite(psnr_db) ? nlohmann::json(psnr_db) : nlohmann::json(nullptr)},
          {"storage_kb", storage_kb},
          {"valid_pixels", valid_pixels},
          {"nonfinite_pixels", nonfinite_pixels}};
}

std::vector<double> make_depth_ramp(int width, int height, double lo, double hi) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> out(n, lo);
  for (std::size_t i = 0; i < n && n > 1; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

DepthQuantReport depth_quantization_report(const std::vector<double>& depth, int width, int height, double lo,
                                           double hi, int bits) {
  if (bits != 8 && bits != 10 && bits != 12 && bits != 16 && bits != 32)
    throw ConfigError("depth bits must be one of 8, 10, 12, 16, 32");
  if (!(lo < hi)) throw ConfigError("depth range must satisfy lo < hi");
  if (width <= 0 || height <= 0 || depth.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ValidationError("depth buffer size does not match width x height");

  DepthQuantReport r;
  r.bits = bits;
  r.storage_kb = static_cast<double>(width) * height * bits / 8.0 / 1024.0;
  const double levels = std::ldexp(1.0, bits) - 1.0;
  const double step = (hi - lo) / levels;
  r.step_cm = bits == 32 ? 0.0 : step * 100.0;

  std::unordered_set<std::uint64_t> uniques;
  double sum = 0.0, sq = 0.0;
  for (double d : depth) {
    if (!std::isfinite(d)) {
      ++r.nonfinite_pixels;
      continue;
    }
    double recon;
    if (bits == 32) {
      const float f = static_cast<float>(d);
      recon = static_cast<double>(f);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof raw);
      uniques.insert(raw);
    } else {
      const double q = std::nearbyint(std::clamp((d - lo) / step, 0.0, levels));
      recon = lo + q * step;
      uniques.insert(static_cast<std::uint64_t>(q));
    }
    const double e = std::abs(recon - d) * 100.0;
    r.max_err_cm = std::max(r.max_err_cm, e);
    sum += e;
    sq += e * e;
    ++r.valid_pixels;
  }
  r.unique_values = uniques.size();
  if (r.valid_pixels > 0) {
    r.mean_err_cm = sum / static_cast<double>(r.valid_pixels);
    r.rmse_cm = std::sqrt(sq / static_cast<double>(r.valid_pixels));
  }
  r.psnr_db = r.rmse_cm > 0.0 ? 20.0 * std::log10((hi - lo) * 100.0 / r.rmse_cm)
                              : std::numeric_limits<double>::infinity();
  return r;
}

std::string depth_quant_csv(const std::vector<DepthQuantReport>& reports) {
  std::ostringstream os;
  os.precision(8);
  os << "bits,unique_values,step_cm,max_err_cm,mean_err_cm,rmse_cm,psnr_db,storage_kb\n";
  for (const auto& r : reports)
    os << r.bits << ',' << r.unique_values << ',' << r.step_cm << ',' << r.max_err_cm << ',' << r.mean_err_cm << ','
       << r.rmse_cm << ',' << r.psnr_db << ',' << r.storage_kb << '\n';
  return os.str();
}

}  // namespace cosplan
