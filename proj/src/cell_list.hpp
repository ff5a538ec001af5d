#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cva/exec.hpp"
#include "cva/particles.hpp"

namespace cva::detail {

/// Sum of orientations in fixed chunks of 4096, merged in chunk order, so the
/// result does not depend on the driver or the thread count.
Vec3 ordered_orientation_sum(const std::vector<UnitVec>& orientations, Exec exec);

/// Uniform spatial hash for kernel sums J(x) = sum_j K(|x - X_j|) omega_j in a
/// periodic cube. Cell side is >= R/2, so the 5x5x5 block around the query
/// cell covers the kernel support; blocks whose nearest point is farther than
/// R are skipped. Small boxes (< 5 cells per side) fall back to a direct scan
/// with the minimum-image convention; a ball kernel that covers the whole box
/// reduces to one global sum.
class CellList {
 public:
  CellList(const ParticleState& state, const KernelSpec& kernel, Exec exec);

  Vec3 kernel_sum(const Vec3& x) const;

  /// Particle indices grouped by cell (iteration order with good locality).
  const std::vector<std::uint32_t>& order() const { return perm_; }

 private:
  enum class Mode { cells, direct, global };

  Vec3 scan_direct(const Vec3& x) const;

  const ParticleState& state_;
  KernelSpec kernel_;
  Mode mode_ = Mode::cells;
  double box_ = 1.0;
  double r2_ = 1.0;
  int n_side_ = 1;
  double side_ = 1.0;
  Vec3 global_sum_ = Vec3::Zero();
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> cell_start_;
  std::vector<double> px_, py_, pz_, ox_, oy_, oz_;
};

}  // namespace cva::detail
