#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace splitflow {

// All delays are integer microseconds and all data sizes integer bytes, so
// cut values and delay evaluations compare exactly.
using Micros = std::int64_t;
using Bytes = std::int64_t;

// Sentinel capacity for pinning arcs. Any finite cut must avoid it.
inline constexpr Micros kInfUs = Micros{1} << 62;

// Computed capacities must stay below this bound or the construction reports
// an overflow instead of wrapping.
inline constexpr Micros kCapLimitUs = Micros{1} << 61;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// round(bytes * 1e6 / rate_Bps) to the nearest microsecond, ties away from
// zero. Inputs are nonnegative.
Micros transfer_us(Bytes bytes, Bytes rate_Bps);

Micros checked_add_us(Micros a, Micros b);
Micros checked_mul_us(Micros a, Micros b);

}  // namespace splitflow
