#pragma once

#include <functional>
#include <vector>

namespace cva {

/// Tabulated CDF of a density on mu in [-1, 1], sampled by inverse transform
/// with monotone linear interpolation. Table nodes are graded towards mu = 1
/// on the scale `layer_width` (uniform when the layer is wide).
class InverseCdfTable {
 public:
  InverseCdfTable() = default;

  /// `density` need not be normalized; it must be >= 0 and integrable.
  static InverseCdfTable from_density(const std::function<double(double)>& density, double layer_width,
                                      int n_points = 4096);
  /// `cdf` is clipped to [0, 1] and made monotone.
  static InverseCdfTable from_cdf(const std::function<double(double)>& cdf, double layer_width, int n_points = 4096);

  static std::vector<double> graded_nodes(double layer_width, int n_points);

  /// u in [0, 1) -> mu.
  double quantile(double u) const;

  const std::vector<double>& nodes() const { return mu_; }
  const std::vector<double>& cdf() const { return cdf_; }

 private:
  std::vector<double> mu_;
  std::vector<double> cdf_;
};

}  // namespace cva
