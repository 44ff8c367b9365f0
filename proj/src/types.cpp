#include "splitflow/types.hpp"

namespace splitflow {

using i128 = __int128;

Micros transfer_us(Bytes bytes, Bytes rate_Bps) {
  if (rate_Bps <= 0) throw Error("transfer_us: rate must be positive");
  if (bytes < 0) throw Error("transfer_us: negative byte count");
  const i128 numer = i128(bytes) * 1'000'000 + rate_Bps / 2;
  const i128 q = numer / rate_Bps;
  if (q > i128(kCapLimitUs))
    throw Error("transfer_us: result exceeds the capacity range");
  return static_cast<Micros>(q);
}

Micros checked_add_us(Micros a, Micros b) {
  const i128 s = i128(a) + i128(b);
  if (s > i128(kCapLimitUs) || s < -i128(kCapLimitUs))
    throw Error("capacity arithmetic overflow in addition");
  return static_cast<Micros>(s);
}

Micros checked_mul_us(Micros a, Micros b) {
  const i128 p = i128(a) * i128(b);
  if (p > i128(kCapLimitUs) || p < -i128(kCapLimitUs))
    throw Error("capacity arithmetic overflow in multiplication");
  return static_cast<Micros>(p);
}

}  // namespace splitflow
