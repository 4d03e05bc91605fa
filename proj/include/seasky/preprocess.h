#pragma once

#include <vector>

#include "seasky/sonar_core.h"

namespace seasky {

struct KernelSize {
  int rows = 3;
  int cols = 3;
};

struct PreprocessConfig {
  SonarSource chain = SonarSource::kHorizontal;
  double row_quantile = 0.10;
  double center_mask_min = deg2rad(-10.0);
  double center_mask_max = deg2rad(10.0);
  // Center-mask threshold as a fraction of the frame maximum at the time of
  // masking (pre-normalization), i.e. 40 on the final 8-bit scale.
  double center_mask_fraction = 40.0 / 255.0;
  KernelSize open_kernel{3, 1};
  KernelSize median_kernel{3, 3};

  void validate() const;

  static PreprocessConfig horizontal_default();
  static PreprocessConfig vertical_default();
};

// Binary mask, same layout as the image buffer.
using PixelMask = std::vector<bool>;

// Lower nearest-rank quantile of each row (element at index floor(q*(n-1))
// of the sorted row) is subtracted, clamped at zero.
PolarSonarImage subtract_row_quantile(const PolarSonarImage& img, double q);

// Otsu threshold over the exact value histogram: the returned value is the
// largest intensity of the lower class. Throws std::domain_error
// ("degenerate histogram") for a constant image.
double otsu_threshold(const PolarSonarImage& img);

// Pixels strictly above the Otsu threshold.
PixelMask otsu_mask(const PolarSonarImage& img);

PolarSonarImage apply_mask(const PolarSonarImage& img, const PixelMask& mask);

PolarSonarImage subtract_row_mean(const PolarSonarImage& img);

// Zeroes pixels below `threshold` in columns whose bearing lies inside
// [interval_min, interval_max]. Throws std::invalid_argument if the interval
// is not inside the image field of view.
PolarSonarImage mask_center_bearings(const PolarSonarImage& img,
                                     double interval_min, double interval_max,
                                     double threshold);

// Linear min/max rescale onto [0, 255], rounding half up. An all-zero image
// comes back unchanged; a constant non-zero image maps to 255.
PolarSonarImage normalize_to_8bit(const PolarSonarImage& img);

// Grayscale erosion then dilation with a rectangular element, replicate
// borders. Throws std::invalid_argument for even kernel dimensions.
PolarSonarImage morphological_open(const PolarSonarImage& img,
                                   KernelSize kernel);

PolarSonarImage median_filter(const PolarSonarImage& img, KernelSize kernel);

PolarSonarImage preprocess_horizontal(
    const PolarSonarImage& img,
    const PreprocessConfig& cfg = PreprocessConfig::horizontal_default());

PolarSonarImage preprocess_vertical(
    const PolarSonarImage& img,
    const PreprocessConfig& cfg = PreprocessConfig::vertical_default());

// Dispatches on cfg.chain.
PolarSonarImage preprocess(const PolarSonarImage& img,
                           const PreprocessConfig& cfg);

}  // namespace seasky
