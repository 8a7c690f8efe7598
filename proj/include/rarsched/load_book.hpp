#pragma once

#include <span>
#include <vector>

#include "rarsched/types.hpp"

namespace rarsched {

// Per-GPU planning state: accumulated estimated execution time and the first
// slot the GPU is free again. GPUs are addressed by a flat index ordered by
// (server, gpu) so index order is also the first-fit scan order.
class GpuLoadBook {
  public:
    explicit GpuLoadBook(const ClusterSpec& cluster);

    int size() const { return static_cast<int>(load_.size()); }
    int server_count() const { return static_cast<int>(first_flat_.size()) - 1; }

    GpuRef ref(int flat) const { return {server_of_[flat], flat - first_flat_[server_of_[flat]]}; }
    int first_flat(int server) const { return first_flat_[server]; }
    int capacity(int server) const { return first_flat_[server + 1] - first_flat_[server]; }

    double load(int flat) const { return load_[flat]; }
    int next_free(int flat) const { return next_free_[flat]; }
    double max_load() const;
    double mean_server_load(int server) const;

    // Books `load_delta` of estimated work on each GPU and marks it busy
    // through `end_slot`.
    void assign(std::span<const int> flats, double load_delta, int end_slot);

    // First slot after `clock` at which any busy GPU frees up, or 0 when
    // nothing is pending beyond `clock`.
    int next_release_after(int clock) const;

  private:
    std::vector<double> load_;
    std::vector<int> next_free_;
    std::vector<int> server_of_;
    std::vector<int> first_flat_;  // size server_count + 1
};

}  // namespace rarsched
