#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splitflow/delay.hpp"
#include "splitflow/profile.hpp"

namespace splitflow {

enum class Band { sub6, mmwave };
enum class Strategy { proposed, oss, device_only };

const char* to_string(Band b);
const char* to_string(Strategy s);

struct DeviceSpec {
  std::string id;
  double tier_factor = 1.0;  // device compute scale relative to the profile
  double x_m = 0;
  double y_m = 0;
  double heading_rad = 0;
  double speed_mps = 30.0 * 1000.0 / 3600.0;
};

// Optional SNR(dB) -> bitrate table replacing the Shannon rate model;
// rows sorted by SNR, lookup takes the highest row at or below the sample.
struct RateTable {
  std::vector<std::pair<double, double>> snr_db_to_bps;
};

struct Scenario {
  Band band = Band::mmwave;
  double carrier_ghz = 28.0;
  double eirp_dbm = 50.0;  // 40 dBm sub-6, 50 dBm mmWave
  int num_beams = 64;      // 16 sub-6, 64 mmWave
  double sigma_db = 4.0;   // shadow fading: Good 2 / Normal 4 / Poor 6
  double path_loss_exponent = 2.0;
  double bandwidth_hz = 100e6;
  double noise_figure_db = 7.0;
  double cell_radius_m = 250.0;
  double epoch_seconds = 1.0;
  Bytes min_rate_Bps = 1000;
  int epochs = 300;
  int local_iters = 5;
  std::uint64_t seed = 1;
  std::vector<DeviceSpec> devices;
  std::optional<RateTable> rate_table;
};

// Band presets plus twenty mobile devices in four compute tiers placed
// uniformly in the cell.
Scenario default_scenario(Band band, std::uint64_t seed = 1);
Scenario load_scenario(const std::string& json_text);
std::string scenario_fixture(Band band);

double path_loss_db(double f_ghz, double d_m, double eta, double chi_db);
double noise_floor_dbm(double bandwidth_hz, double noise_figure_db);
Bytes shannon_rate_Bps(double snr_db, double bandwidth_hz);

// Uplink/downlink realization for one device at time t_s with explicit
// shadow-fading draws; the simulator feeds per-device Gaussian streams in.
struct LinkSample {
  Bytes rate_up_Bps = 0;
  Bytes rate_down_Bps = 0;
  double distance_m = 0;
};
LinkSample link_rate(const Scenario& sc, const DeviceSpec& device, double t_s,
                     double chi_up_db, double chi_down_db);

struct EpochReport {
  int epoch = 0;
  std::string device_id;
  Bytes rate_up_Bps = 0;
  Bytes rate_down_Bps = 0;
  Strategy strategy = Strategy::proposed;
  Partition partition;
  Micros delay_us = 0;

  bool operator==(const EpochReport&) const = default;
};

// Round-robin scheduling over the device list; one device trains per epoch.
// proposed re-splits per epoch via the block-wise pipeline, oss holds the
// single static cut that minimizes the total delay over the realized trace,
// device-only keeps every layer on the device.
std::vector<EpochReport> simulate(const Scenario& sc, Strategy strategy,
                                  const ModelProfile& p);

struct ComparisonReport {
  std::vector<EpochReport> proposed;
  std::vector<EpochReport> oss;
  std::vector<EpochReport> device_only;
  std::vector<Micros> worst_static_us;  // per-epoch worst static cut
  Partition oss_partition;
};

// Runs all strategies over one realized trace.
ComparisonReport simulate_compare(const Scenario& sc, const ModelProfile& p);

void write_reports_csv(std::ostream& os, const std::vector<EpochReport>& reports);
std::string summary_json(const ComparisonReport& report);

}  // namespace splitflow
