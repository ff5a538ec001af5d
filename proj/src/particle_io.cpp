#include "cva/particle_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <boost/endian/conversion.hpp>

namespace cva {

namespace {

constexpr char kMagic[8] = {'C', 'V', 'A', 'P', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::ostream& out, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = boost::endian::native_to_little(std::bit_cast<U>(v));
  out.write(reinterpret_cast<const char*>(&bits), sizeof(U));
}

template <class T>
T get(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits;
  in.read(reinterpret_cast<char*>(&bits), sizeof(U));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return std::bit_cast<T>(boost::endian::little_to_native(bits));
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParticleState& state) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, state.size());
  put<std::uint64_t>(out, state.seed);
  put<std::uint64_t>(out, state.step);
  put<double>(out, state.box);
  put<double>(out, state.time);
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (int a = 0; a < 3; ++a) put<double>(out, state.positions[i][a]);
    for (int a = 0; a < 3; ++a) put<double>(out, state.orientations[i].vec()[a]);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void write_checkpoint(const std::string& path, const ParticleState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  write_checkpoint(out, state);
}

ParticleState read_checkpoint(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("checkpoint: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  get<std::uint32_t>(in);
  ParticleState s;
  const auto n = get<std::uint64_t>(in);
  s.seed = get<std::uint64_t>(in);
  s.step = get<std::uint64_t>(in);
  s.box = get<double>(in);
  s.time = get<double>(in);
  s.positions.resize(n);
  s.orientations.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 x, o;
    for (int a = 0; a < 3; ++a) x[a] = get<double>(in);
    for (int a = 0; a < 3; ++a) o[a] = get<double>(in);
    s.positions[i] = x;
    s.orientations[i] = UnitVec::from_unit(o);
  }
  return s;
}

ParticleState read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  return read_checkpoint(in);
}

namespace {

// Full round-trip precision for the duration of one call.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(std::ostream& out) : out_(out), flags_(out.flags()), precision_(out.precision(17)) {
    out.unsetf(std::ios::floatfield);
  }
  ~PrecisionGuard() {
    out_.flags(flags_);
    out_.precision(precision_);
  }

 private:
  std::ostream& out_;
  std::ios::fmtflags flags_;
  std::streamsize precision_;
};

}  // namespace

void write_moment_rows(std::ostream& out, const MomentField& m, std::uint64_t step, double time) {
  const PrecisionGuard guard(out);
  for (int iz = 0; iz < m.bins.nz; ++iz)
    for (int iy = 0; iy < m.bins.ny; ++iy)
      for (int ix = 0; ix < m.bins.nx; ++ix) {
        const std::size_t b = m.index(ix, iy, iz);
        out << step << ',' << time << ',' << ix << ',' << iy << ',' << iz << ',' << m.counts[b] << ',' << m.rho[b]
            << ',' << m.j[b].x() << ',' << m.j[b].y() << ',' << m.j[b].z() << '\n';
      }
}

void write_particle_rows(std::ostream& out, const ParticleState& state) {
  const PrecisionGuard guard(out);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const Vec3& x = state.positions[i];
    const Vec3& o = state.orientations[i].vec();
    out << state.step << ',' << state.time << ',' << i << ',' << x.x() << ',' << x.y() << ',' << x.z() << ','
        << o.x() << ',' << o.y() << ',' << o.z() << '\n';
  }
}

}  // namespace cva
