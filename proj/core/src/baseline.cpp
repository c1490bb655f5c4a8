#include "bolasim/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace bolasim {

Decision bba_choose(const BbaConfig& cfg, const ChunkLadder& ladder, double q) {
  if (!(cfg.reservoir_s > 0.0 && cfg.reservoir_s < cfg.cushion_s)) {
    throw ValidationError("bba: need 0 < reservoir < cushion");
  }
  if (ladder.encodings.empty()) {
    throw ValidationError("bba: empty ladder");
  }

  const int m = static_cast<int>(ladder.encodings.size());
  int index = 0;
  if (q >= cfg.cushion_s) {
    index = m - 1;
  } else if (q > cfg.reservoir_s) {
    const double t = (q - cfg.reservoir_s) / (cfg.cushion_s - cfg.reservoir_s);
    index = std::clamp(static_cast<int>(std::floor((m - 1) * t)), 0, m - 1);
  }
  return Decision::send(ladder.encodings[static_cast<std::size_t>(index)].format_id);
}

}  // namespace bolasim
