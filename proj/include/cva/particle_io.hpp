#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "cva/particles.hpp"

namespace cva {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary checkpoint: 8-byte magic "CVAPCKPT", u32 version, u32 reserved,
/// u64 n, u64 seed, u64 step, f64 box, f64 time, then n records of six f64
/// (x, y, z, omega_x, omega_y, omega_z). All little-endian.
void write_checkpoint(std::ostream& out, const ParticleState& state);
void write_checkpoint(const std::string& path, const ParticleState& state);
/// Throws std::runtime_error on bad magic, unknown version or truncation.
ParticleState read_checkpoint(std::istream& in);
ParticleState read_checkpoint(const std::string& path);

/// Rows "step,time,ix,iy,iz,count,rho,jx,jy,jz" (no header line).
void write_moment_rows(std::ostream& out, const MomentField& m, std::uint64_t step, double time);
inline constexpr const char* kMomentColumns = "step,time,ix,iy,iz,count,rho,jx,jy,jz";

/// One row per particle: "step,time,id,x,y,z,ox,oy,oz" (no header line).
void write_particle_rows(std::ostream& out, const ParticleState& state);
inline constexpr const char* kParticleColumns = "step,time,id,x,y,z,ox,oy,oz";

}  // namespace cva
