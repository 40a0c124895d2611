#pragma once

#include "hnn/common.hpp"
#include "hnn/rng.hpp"

#include <vector>

namespace hnn::data {

// Contiguous out-of-bag window; the bag is its complement.
struct BlockSplit {
    std::vector<int> bag_indices;
    std::vector<int> oob_indices;
    int oob_start = 0;
    int oob_length = 0;
};

// The window start is drawn uniformly over the grid of non-overlapping block
// offsets {0, L, 2L, ...} (plus T-L when L does not divide T), so every
// observation lands out-of-bag with probability ~ (1-rate) and the expected
// per-t ensemble contribution count is (1-rate)*B.
inline BlockSplit draw_block_split(int T, double rate, std::uint64_t seed) {
    if (!(rate > 0.0 && rate < 1.0)) throw ConfigError("draw_block_split: rate must be in (0,1)");
    if (T < 2) throw DomainError("draw_block_split: sample too short");
    const int L = std::max(1, static_cast<int>(std::lround((1.0 - rate) * T)));
    std::vector<int> starts;
    for (int s = 0; s + L <= T; s += L) starts.push_back(s);
    if (starts.back() + L < T) starts.push_back(T - L);
    Rng rng(seed);
    const int start = starts[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<long>(starts.size()) - 1))];
    BlockSplit split;
    split.oob_start = start;
    split.oob_length = L;
    split.bag_indices.reserve(static_cast<std::size_t>(T - L));
    split.oob_indices.reserve(static_cast<std::size_t>(L));
    for (int t = 0; t < T; ++t) {
        if (t >= start && t < start + L)
            split.oob_indices.push_back(t);
        else
            split.bag_indices.push_back(t);
    }
    return split;
}

}  // namespace hnn::data
