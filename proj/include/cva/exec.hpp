#pragma once

namespace cva {

/// Which driver runs a data-parallel kernel. `serial` is the reference
/// implementation; `parallel` is the OpenMP driver over the same per-element
/// update and must agree with it (bit-for-bit where the contract says so).
enum class Exec { serial, parallel };

/// Thread count used by Exec::parallel (0 = OpenMP default).
void set_num_threads(int n);
int num_threads();

}  // namespace cva
