#include <doctest.h>

#include <vector>

#include "bolasim/baseline.hpp"

using namespace bolasim;

namespace {

ChunkLadder ladder_with_formats(int m, double base_size = 1e5) {
  ChunkLadder lad;
  lad.chunk_index = 0;
  lad.duration_s = 2.002;
  double size = base_size;
  double ssim = 0.6;
  for (int k = 0; k < m; ++k) {
    lad.encodings.push_back(Encoding{k, size, Ssim(ssim)});
    size *= 1.4;
    ssim += 0.03;
  }
  return lad;
}

}  // namespace

TEST_CASE("bba_choose pins the rate map at the anchors") {
  const BbaConfig cfg{3.0, 15.0};
  const auto lad = ladder_with_formats(10);
  CHECK(bba_choose(cfg, lad, 0.0) == Decision::send(0));
  CHECK(bba_choose(cfg, lad, 2.0) == Decision::send(0));
  CHECK(bba_choose(cfg, lad, 3.0) == Decision::send(0));
  CHECK(bba_choose(cfg, lad, 15.0) == Decision::send(9));
  CHECK(bba_choose(cfg, lad, 50.0) == Decision::send(9));
  // floor(9 * (9-3)/12) = 4
  CHECK(bba_choose(cfg, lad, 9.0) == Decision::send(4));
}

TEST_CASE("bba_choose index is nondecreasing and clamped") {
  const BbaConfig cfg{3.0, 15.0};
  for (const int m : {1, 2, 5, 10}) {
    const auto lad = ladder_with_formats(m);
    int prev = 0;
    for (double q = 0.0; q <= 20.0; q += 0.01) {
      const Decision d = bba_choose(cfg, lad, q);
      REQUIRE(d.is_send());
      REQUIRE(d.format_id() >= prev);
      REQUIRE(d.format_id() <= m - 1);
      prev = d.format_id();
    }
    CHECK(bba_choose(cfg, lad, 0.0) == bba_choose(cfg, lad, cfg.reservoir_s));
    CHECK(bba_choose(cfg, lad, cfg.cushion_s) == bba_choose(cfg, lad, 100.0));
  }
}

TEST_CASE("bba_choose ignores sizes and quality") {
  const BbaConfig cfg{3.0, 15.0};
  const auto small = ladder_with_formats(10, 2e4);
  const auto large = ladder_with_formats(10, 9e6);
  for (double q = 0.0; q <= 20.0; q += 0.25) {
    CHECK(bba_choose(cfg, small, q) == bba_choose(cfg, large, q));
  }
}

TEST_CASE("bba_choose validates its inputs") {
  const auto lad = ladder_with_formats(3);
  CHECK_THROWS_AS(bba_choose(BbaConfig{15.0, 3.0}, lad, 1.0), ValidationError);
  CHECK_THROWS_AS(bba_choose(BbaConfig{0.0, 15.0}, lad, 1.0), ValidationError);
  ChunkLadder empty;
  empty.duration_s = 2.0;
  CHECK_THROWS_AS(bba_choose(BbaConfig{}, empty, 1.0), ValidationError);
}
