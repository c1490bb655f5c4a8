#pragma once

#include "bolasim/bola.hpp"
#include "bolasim/media.hpp"

namespace bolasim {

/// Buffer-based comparison baseline: a rank-linear map from buffer level to
/// format index between two buffer anchors. Ignores sizes and quality.
struct BbaConfig {
  double reservoir_s = 3.0;
  double cushion_s = 15.0;
};

/// q <= reservoir picks the lowest format, q >= cushion the highest, and the
/// span in between maps linearly onto format rank. Never declines to send.
Decision bba_choose(const BbaConfig& cfg, const ChunkLadder& ladder, double q);

}  // namespace bolasim
