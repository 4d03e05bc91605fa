#include "seasky/preprocess.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace seasky {

namespace {

void check_kernel(KernelSize k) {
  if (k.rows <= 0 || k.cols <= 0 || k.rows % 2 == 0 || k.cols % 2 == 0) {
    throw std::invalid_argument("kernel dimensions must be odd and positive");
  }
}

// Separable rectangular min/max filter with replicated borders.
template <typename Pick>
std::vector<double> rect_filter(const PolarSonarImage& img, KernelSize k,
                                Pick pick) {
  const int rows = img.rows();
  const int cols = img.cols();
  const int hr = k.rows / 2;
  const int hc = k.cols / 2;
  const auto& src = img.data();

  std::vector<double> horiz(src.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = src[r * cols + c];
      for (int d = -hc; d <= hc; ++d) {
        const int cc = std::clamp(c + d, 0, cols - 1);
        acc = pick(acc, src[r * cols + cc]);
      }
      horiz[r * cols + c] = acc;
    }
  }
  std::vector<double> out(src.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = horiz[r * cols + c];
      for (int d = -hr; d <= hr; ++d) {
        const int rr = std::clamp(r + d, 0, rows - 1);
        acc = pick(acc, horiz[rr * cols + c]);
      }
      out[r * cols + c] = acc;
    }
  }
  return out;
}

double min_of(double a, double b) { return std::min(a, b); }
double max_of(double a, double b) { return std::max(a, b); }

}  // namespace

void PreprocessConfig::validate() const {
  if (!(row_quantile >= 0.0 && row_quantile <= 1.0))
    throw std::invalid_argument("row_quantile must lie in [0, 1]");
  if (!(center_mask_min < center_mask_max))
    throw std::invalid_argument("center mask interval is empty");
  if (!(center_mask_fraction >= 0.0 && center_mask_fraction <= 1.0))
    throw std::invalid_argument("center_mask_fraction must lie in [0, 1]");
  check_kernel(open_kernel);
  check_kernel(median_kernel);
}

PreprocessConfig PreprocessConfig::horizontal_default() {
  PreprocessConfig cfg;
  cfg.chain = SonarSource::kHorizontal;
  return cfg;
}

PreprocessConfig PreprocessConfig::vertical_default() {
  PreprocessConfig cfg;
  cfg.chain = SonarSource::kVertical;
  return cfg;
}

PolarSonarImage subtract_row_quantile(const PolarSonarImage& img, double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("quantile must lie in [0, 1]");
  const int rows = img.rows();
  const int cols = img.cols();
  const auto rank = static_cast<std::size_t>(std::floor(q * (cols - 1)));
  std::vector<double> out = img.data();
  std::vector<double> row(cols);
  for (int r = 0; r < rows; ++r) {
    auto first = out.begin() + static_cast<std::ptrdiff_t>(r) * cols;
    std::copy(first, first + cols, row.begin());
    std::nth_element(row.begin(), row.begin() + rank, row.end());
    const double level = row[rank];
    for (auto it = first; it != first + cols; ++it) {
      *it = std::max(0.0, *it - level);
    }
  }
  return img.with_data(std::move(out));
}

double otsu_threshold(const PolarSonarImage& img) {
  std::vector<double> values = img.data();
  std::sort(values.begin(), values.end());
  if (values.empty() || values.front() == values.back()) {
    throw std::domain_error("degenerate histogram");
  }

  const double n = static_cast<double>(values.size());
  double total = 0.0;
  for (double v : values) total += v;

  // Sweep thresholds at each distinct value boundary.
  double best_var = -1.0;
  double best_threshold = values.front();
  double count_low = 0.0;
  double sum_low = 0.0;
  std::size_t i = 0;
  while (i < values.size()) {
    const double v = values[i];
    while (i < values.size() && values[i] == v) {
      count_low += 1.0;
      sum_low += v;
      ++i;
    }
    if (i == values.size()) break;
    const double w0 = count_low / n;
    const double w1 = 1.0 - w0;
    const double mu0 = sum_low / count_low;
    const double mu1 = (total - sum_low) / (n - count_low);
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best_var) {
      best_var = between;
      best_threshold = v;
    }
  }
  return best_threshold;
}

PixelMask otsu_mask(const PolarSonarImage& img) {
  const double threshold = otsu_threshold(img);
  PixelMask mask(img.data().size());
  std::transform(img.data().begin(), img.data().end(), mask.begin(),
                 [threshold](double v) { return v > threshold; });
  return mask;
}

PolarSonarImage apply_mask(const PolarSonarImage& img, const PixelMask& mask) {
  if (mask.size() != img.data().size())
    throw std::invalid_argument("mask size does not match image");
  std::vector<double> out = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask[i]) out[i] = 0.0;
  }
  return img.with_data(std::move(out));
}

PolarSonarImage subtract_row_mean(const PolarSonarImage& img) {
  const int rows = img.rows();
  const int cols = img.cols();
  std::vector<double> out = img.data();
  for (int r = 0; r < rows; ++r) {
    auto first = out.begin() + static_cast<std::ptrdiff_t>(r) * cols;
    double sum = 0.0;
    for (auto it = first; it != first + cols; ++it) sum += *it;
    const double mean = sum / cols;
    for (auto it = first; it != first + cols; ++it) {
      *it = std::max(0.0, *it - mean);
    }
  }
  return img.with_data(std::move(out));
}

PolarSonarImage mask_center_bearings(const PolarSonarImage& img,
                                     double interval_min, double interval_max,
                                     double threshold) {
  const auto& in = img.intrinsics();
  if (!(interval_min <= interval_max) || interval_min < in.bearing_min ||
      interval_max > in.bearing_max) {
    throw std::invalid_argument("center mask interval outside field of view");
  }
  std::vector<double> out = img.data();
  const int cols = img.cols();
  for (int c = 0; c < cols; ++c) {
    const double bearing = bearing_of_column(in, c);
    if (bearing < interval_min || bearing > interval_max) continue;
    for (int r = 0; r < img.rows(); ++r) {
      double& v = out[static_cast<std::size_t>(r) * cols + c];
      if (v < threshold) v = 0.0;
    }
  }
  return img.with_data(std::move(out));
}

PolarSonarImage normalize_to_8bit(const PolarSonarImage& img) {
  const double hi = img.max_value();
  if (hi <= 0.0) return img;
  const double lo = img.min_value();
  std::vector<double> out(img.data().size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 255.0);
    return img.with_data(std::move(out));
  }
  const double scale = 255.0 / (hi - lo);
  std::transform(img.data().begin(), img.data().end(), out.begin(),
                 [lo, scale](double v) {
                   return std::min(255.0, std::floor((v - lo) * scale + 0.5));
                 });
  return img.with_data(std::move(out));
}

PolarSonarImage morphological_open(const PolarSonarImage& img,
                                   KernelSize kernel) {
  check_kernel(kernel);
  const PolarSonarImage eroded =
      img.with_data(rect_filter(img, kernel, min_of));
  return img.with_data(rect_filter(eroded, kernel, max_of));
}

PolarSonarImage median_filter(const PolarSonarImage& img, KernelSize kernel) {
  check_kernel(kernel);
  const int rows = img.rows();
  const int cols = img.cols();
  const int hr = kernel.rows / 2;
  const int hc = kernel.cols / 2;
  const auto& src = img.data();
  std::vector<double> out(src.size());
  std::vector<double> window(static_cast<std::size_t>(kernel.rows) *
                             kernel.cols);
  const auto mid = window.size() / 2;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::size_t k = 0;
      for (int dr = -hr; dr <= hr; ++dr) {
        const int rr = std::clamp(r + dr, 0, rows - 1);
        for (int dc = -hc; dc <= hc; ++dc) {
          const int cc = std::clamp(c + dc, 0, cols - 1);
          window[k++] = src[static_cast<std::size_t>(rr) * cols + cc];
        }
      }
      std::nth_element(window.begin(), window.begin() + mid, window.end());
      out[static_cast<std::size_t>(r) * cols + c] = window[mid];
    }
  }
  return img.with_data(std::move(out));
}

PolarSonarImage preprocess_horizontal(const PolarSonarImage& img,
                                      const PreprocessConfig& cfg) {
  cfg.validate();
  const PolarSonarImage flattened = subtract_row_quantile(img, cfg.row_quantile);
  // All-zero frame: nothing to threshold.
  if (flattened.max_value() <= 0.0) return flattened;
  const PolarSonarImage masked = apply_mask(flattened, otsu_mask(flattened));
  return morphological_open(normalize_to_8bit(masked), cfg.open_kernel);
}

PolarSonarImage preprocess_vertical(const PolarSonarImage& img,
                                    const PreprocessConfig& cfg) {
  cfg.validate();
  const PolarSonarImage flattened = subtract_row_mean(img);
  const double threshold = cfg.center_mask_fraction * flattened.max_value();
  const PolarSonarImage masked = mask_center_bearings(
      flattened, cfg.center_mask_min, cfg.center_mask_max, threshold);
  return median_filter(normalize_to_8bit(masked), cfg.median_kernel);
}

PolarSonarImage preprocess(const PolarSonarImage& img,
                           const PreprocessConfig& cfg) {
  return cfg.chain == SonarSource::kHorizontal ? preprocess_horizontal(img, cfg)
                                               : preprocess_vertical(img, cfg);
}

}  // namespace seasky
