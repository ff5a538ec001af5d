#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "cva/particle_io.hpp"

using namespace cva;

TEST_SUITE("io") {

TEST_CASE("checkpoint round trip is exact") {
  auto s = make_state(257, 3.0, 77, InitialOrientation{});
  s.time = 1.25;
  s.step = 12;
  std::stringstream buf;
  write_checkpoint(buf, s);
  CHECK(buf.str().size() == 8 + 4 + 4 + 3 * 8 + 2 * 8 + 257 * 48);
  const auto r = read_checkpoint(buf);
  CHECK(r.seed == 77);
  CHECK(r.step == 12);
  CHECK(r.time == 1.25);
  CHECK(r.box == 3.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(r.positions[i] == s.positions[i]);
    CHECK(r.orientations[i].vec() == s.orientations[i].vec());
  }
}

TEST_CASE("checkpoint header is little-endian") {
  std::stringstream buf;
  write_checkpoint(buf, make_state(1, 1.0, 0x0102030405060708ull, InitialOrientation{}));
  const std::string b = buf.str();
  CHECK(b.substr(0, 8) == "CVAPCKPT");
  CHECK(static_cast<unsigned char>(b[8]) == kCheckpointVersion);
  CHECK(static_cast<unsigned char>(b[24]) == 0x08);
  CHECK(static_cast<unsigned char>(b[31]) == 0x01);
}

TEST_CASE("corrupt checkpoints are rejected") {
  std::stringstream bad("NOTACKPT");
  CHECK_THROWS_AS(read_checkpoint(bad), std::runtime_error);
  std::stringstream buf;
  write_checkpoint(buf, make_state(10, 1.0, 1, InitialOrientation{}));
  std::string b = buf.str();
  std::stringstream truncated(b.substr(0, b.size() - 5));
  CHECK_THROWS_AS(read_checkpoint(truncated), std::runtime_error);
  b[8] = 9;
  std::stringstream version(b);
  CHECK_THROWS_AS(read_checkpoint(version), std::runtime_error);
}

TEST_CASE("moment rows follow the column contract") {
  const auto s = make_state(100, 2.0, 1, InitialOrientation{});
  std::ostringstream out;
  write_moment_rows(out, compute_moments(s, BinSpec{2, 1, 1}), 0, 0.0);
  std::istringstream lines(out.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
    ++n;
  }
  CHECK(n == 2);
}

}
