#pragma once

// Test-only reference implementations, independent of the library code paths
// they check.

#include <cassert>
#include <cstdint>
#include <vector>

namespace rarsched::testing {

// Explicit ring simulation: w workers, gradient of dim d split into w chunks.
// Share-reduce for w-1 steps, then share-only for w-1 steps. Returns the data
// volume received per worker and verifies every worker ends with the full sum
// of every chunk.
inline double ring_allreduce_received_per_worker(int w, double d) {
    const double chunk = d / w;
    // contributions[worker][chunk] = set of workers whose value is folded in,
    // tracked as a bitmask.
    std::vector<std::vector<std::uint32_t>> have(w, std::vector<std::uint32_t>(w));
    for (int i = 0; i < w; ++i)
        for (int c = 0; c < w; ++c) have[i][c] = 1u << i;

    std::vector<double> received(w, 0.0);
    // Share-reduce: in step s, worker i sends chunk (i - s mod w) downstream.
    for (int s = 0; s < w - 1; ++s) {
        std::vector<std::vector<std::uint32_t>> next = have;
        for (int i = 0; i < w; ++i) {
            const int c = ((i - s) % w + w) % w;
            const int dst = (i + 1) % w;
            next[dst][c] |= have[i][c];
            received[dst] += chunk;
        }
        have = std::move(next);
    }
    // Share-only: circulate the completed chunks.
    for (int s = 0; s < w - 1; ++s) {
        std::vector<std::vector<std::uint32_t>> next = have;
        for (int i = 0; i < w; ++i) {
            const int c = ((i + 1 - s) % w + w) % w;
            const int dst = (i + 1) % w;
            next[dst][c] = have[i][c];
            received[dst] += chunk;
        }
        have = std::move(next);
    }
    const std::uint32_t full = w == 32 ? 0xffffffffu : (1u << w) - 1u;
    for (int i = 0; i < w; ++i)
        for (int c = 0; c < w; ++c) assert(have[i][c] == full);
    for (int i = 1; i < w; ++i) assert(received[i] == received[0]);
    return received[0];
}

// Straightforward reference for the completion slot: first n with a running
// total reaching the target, counted from the start slot.
inline long long completion_reference(int start, const std::vector<long long>& speeds,
                                      long long target) {
    long long total = 0;
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        total += speeds[i];
        if (total >= target) return start + static_cast<long long>(i);
    }
    return -1;
}

}  // namespace rarsched::testing
