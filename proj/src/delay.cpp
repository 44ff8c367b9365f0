#include "splitflow/delay.hpp"

namespace splitflow {

namespace {

void require_known_ids(const ModelProfile& p, const Partition& c) {
  for (const auto& id : c.device)
    if (!p.contains(id))
      throw Error("partition: unknown layer id '" + id + "'");
}

}  // namespace

bool is_consistent_partition(const ModelProfile& p, const Partition& c) {
  require_known_ids(p, c);
  for (const auto& [u, v] : p.edges)
    if (!c.on_device(u) && c.on_device(v)) return false;
  return true;
}

std::set<std::string> boundary_set(const ModelProfile& p, const Partition& c) {
  if (!is_consistent_partition(p, c))
    throw Error("boundary_set: partition is not consistent");
  std::set<std::string> out;
  for (const auto& id : c.device) {
    for (const auto& child : p.children(id))
      if (!c.on_device(child)) {
        out.insert(id);
        break;
      }
  }
  for (const auto& child : p.input_consumers())
    if (!c.on_device(child)) {
      out.insert(kInputId);
      break;
    }
  return out;
}

Micros training_delay(const ModelProfile& p, const Partition& c, const NetParams& n) {
  if (!is_consistent_partition(p, c))
    throw Error("training_delay: partition is not consistent");
  if (n.rate_up_Bps <= 0 || n.rate_down_Bps <= 0)
    throw Error("training_delay: rates must be positive");
  if (n.local_iters < 1) throw Error("training_delay: local_iters must be >= 1");

  Micros device_compute = 0;
  Micros server_compute = 0;
  Micros model_transfer = 0;  // upload + download of the device-side model
  for (const auto& l : p.layers) {
    if (c.on_device(l.id)) {
      device_compute = checked_add_us(device_compute, l.xi_device_us);
      model_transfer = checked_add_us(model_transfer, transfer_us(l.param_bytes, n.rate_up_Bps));
      model_transfer = checked_add_us(model_transfer, transfer_us(l.param_bytes, n.rate_down_Bps));
    } else {
      server_compute = checked_add_us(server_compute, l.xi_server_us);
    }
  }

  Micros activation_transfer = 0;  // smashed data up, gradient down
  for (const auto& id : boundary_set(p, c)) {
    Bytes a = p.output_bytes_of(id);
    if (id == kInputId && !n.input_cost) a = 0;
    activation_transfer = checked_add_us(activation_transfer, transfer_us(a, n.rate_up_Bps));
    activation_transfer = checked_add_us(activation_transfer, transfer_us(a, n.rate_down_Bps));
  }

  const Micros per_iter =
      checked_add_us(checked_add_us(device_compute, server_compute), activation_transfer);
  return checked_add_us(checked_mul_us(per_iter, n.local_iters), model_transfer);
}

}  // namespace splitflow
