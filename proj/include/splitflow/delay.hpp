#pragma once

#include <set>
#include <string>

#include "splitflow/profile.hpp"
#include "splitflow/types.hpp"

namespace splitflow {

enum class WeightMode { consistent, paper_literal };

struct NetParams {
  Bytes rate_up_Bps = 1;    // device -> server
  Bytes rate_down_Bps = 1;  // server -> device
  int local_iters = 1;
  WeightMode weight_mode = WeightMode::consistent;
  // When false, raw-input transfer carries no cost and the input
  // pseudo-layer is left out of the split DAG.
  bool input_cost = true;
};

// A device/server split. The device set holds real layer ids; the input
// pseudo-layer is always on the device and stays implicit.
struct Partition {
  std::set<std::string> device;

  bool on_device(const std::string& id) const {
    return id == kInputId || device.count(id) > 0;
  }
  bool operator==(const Partition&) const = default;
};

// True iff no data edge runs from a server-side layer to a device-side one.
bool is_consistent_partition(const ModelProfile& p, const Partition& c);

// Device-side layers with at least one server-side child; may contain the
// input pseudo-layer. Each boundary layer appears once no matter how many
// server-side children it has.
std::set<std::string> boundary_set(const ModelProfile& p, const Partition& c);

// Ground-truth training delay of a consistent partition: local iterations of
// device compute, boundary activation+gradient round trips and server
// compute, plus one device-side model upload and download. Each byte/rate
// division is rounded to the nearest microsecond per layer and direction.
Micros training_delay(const ModelProfile& p, const Partition& c, const NetParams& n);

}  // namespace splitflow
