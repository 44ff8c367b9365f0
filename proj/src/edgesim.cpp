#include "splitflow/edgesim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "splitflow/blockwise.hpp"
#include "splitflow/oracle.hpp"

namespace splitflow {

const char* to_string(Band b) { return b == Band::sub6 ? "sub6" : "mmwave"; }

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::proposed: return "proposed";
    case Strategy::oss: return "oss";
    case Strategy::device_only: return "device-only";
  }
  return "?";
}

double path_loss_db(double f_ghz, double d_m, double eta, double chi_db) {
  if (f_ghz <= 0 || d_m <= 0) throw Error("path_loss_db: frequency and distance must be positive");
  return 32.5 + 20.0 * std::log10(f_ghz) + 10.0 * eta * std::log10(d_m) + chi_db;
}

double noise_floor_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

Bytes shannon_rate_Bps(double snr_db, double bandwidth_hz) {
  const double snr = std::pow(10.0, snr_db / 10.0);
  const double bps = bandwidth_hz * std::log2(1.0 + snr);
  return static_cast<Bytes>(std::llround(bps / 8.0));
}

namespace {

Bytes table_rate_Bps(const RateTable& table, double snr_db) {
  double bps = 0;
  for (const auto& [snr, rate] : table.snr_db_to_bps) {
    if (snr_db < snr) break;
    bps = rate;
  }
  return static_cast<Bytes>(std::llround(bps / 8.0));
}

// Straight-line motion folded back into the cell disk.
double folded_distance_m(const DeviceSpec& d, double t_s, double radius_m) {
  const double x = d.x_m + std::cos(d.heading_rad) * d.speed_mps * t_s;
  const double y = d.y_m + std::sin(d.heading_rad) * d.speed_mps * t_s;
  double r = std::hypot(x, y);
  while (r > radius_m) r = std::fabs(2.0 * radius_m - r);
  return std::max(1.0, r);
}

}  // namespace

LinkSample link_rate(const Scenario& sc, const DeviceSpec& device, double t_s,
                     double chi_up_db, double chi_down_db) {
  LinkSample out;
  out.distance_m = folded_distance_m(device, t_s, sc.cell_radius_m);
  const double tx_dbm = sc.eirp_dbm - 10.0 * std::log10(double(sc.num_beams));
  const double floor_dbm = noise_floor_dbm(sc.bandwidth_hz, sc.noise_figure_db);
  auto one_direction = [&](double chi_db) {
    const double pl = path_loss_db(sc.carrier_ghz, out.distance_m,
                                   sc.path_loss_exponent, chi_db);
    const double snr_db = tx_dbm - pl - floor_dbm;
    const Bytes rate = sc.rate_table ? table_rate_Bps(*sc.rate_table, snr_db)
                                     : shannon_rate_Bps(snr_db, sc.bandwidth_hz);
    return std::max(sc.min_rate_Bps, rate);
  };
  out.rate_up_Bps = one_direction(chi_up_db);
  out.rate_down_Bps = one_direction(chi_down_db);
  return out;
}

Scenario default_scenario(Band band, std::uint64_t seed) {
  Scenario sc;
  sc.band = band;
  sc.seed = seed;
  if (band == Band::sub6) {
    sc.carrier_ghz = 2.1;  // n1
    sc.eirp_dbm = 40.0;
    sc.num_beams = 16;
    sc.bandwidth_hz = 20e6;
  } else {
    sc.carrier_ghz = 28.0;  // n257
    sc.eirp_dbm = 50.0;
    sc.num_beams = 64;
    sc.bandwidth_hz = 100e6;
  }

  std::mt19937_64 rng(seed ^ 0xA0761D6478BD642FULL);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tiers[] = {1.0, 1.5, 2.5, 3.5};  // four device classes
  for (int i = 0; i < 20; ++i) {
    DeviceSpec d;
    d.id = "dev" + std::to_string(i);
    d.tier_factor = tiers[i / 5];
    const double r = sc.cell_radius_m * std::sqrt(unit(rng));
    const double a = angle(rng);
    d.x_m = r * std::cos(a);
    d.y_m = r * std::sin(a);
    d.heading_rad = angle(rng);
    sc.devices.push_back(d);
  }
  return sc;
}

Scenario load_scenario(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("scenario document: malformed JSON: ") + e.what());
  }
  const std::string band_name = doc.value("band", std::string("mmwave"));
  Band band;
  if (band_name == "sub6") band = Band::sub6;
  else if (band_name == "mmwave") band = Band::mmwave;
  else throw Error("scenario document: band must be 'sub6' or 'mmwave'");

  Scenario sc = default_scenario(band, doc.value("seed", std::uint64_t{1}));
  if (doc.contains("channel")) {
    const std::string state = doc.at("channel").get<std::string>();
    if (state == "good") sc.sigma_db = 2.0;
    else if (state == "normal") sc.sigma_db = 4.0;
    else if (state == "poor") sc.sigma_db = 6.0;
    else throw Error("scenario document: channel must be good|normal|poor");
  }
  sc.carrier_ghz = doc.value("carrier_ghz", sc.carrier_ghz);
  sc.eirp_dbm = doc.value("eirp_dbm", sc.eirp_dbm);
  sc.num_beams = doc.value("num_beams", sc.num_beams);
  sc.sigma_db = doc.value("sigma_db", sc.sigma_db);
  sc.path_loss_exponent = doc.value("path_loss_exponent", sc.path_loss_exponent);
  sc.bandwidth_hz = doc.value("bandwidth_hz", sc.bandwidth_hz);
  sc.noise_figure_db = doc.value("noise_figure_db", sc.noise_figure_db);
  sc.cell_radius_m = doc.value("cell_radius_m", sc.cell_radius_m);
  sc.epoch_seconds = doc.value("epoch_seconds", sc.epoch_seconds);
  sc.min_rate_Bps = doc.value("min_rate_Bps", sc.min_rate_Bps);
  sc.epochs = doc.value("epochs", sc.epochs);
  sc.local_iters = doc.value("local_iters", sc.local_iters);

  if (doc.contains("devices")) {
    sc.devices.clear();
    for (const auto& jd : doc.at("devices")) {
      DeviceSpec d;
      d.id = jd.value("id", "dev" + std::to_string(sc.devices.size()));
      d.tier_factor = jd.value("tier_factor", 1.0);
      d.x_m = jd.value("x_m", 0.0);
      d.y_m = jd.value("y_m", 0.0);
      d.heading_rad = jd.value("heading_deg", 0.0) * M_PI / 180.0;
      d.speed_mps = jd.value("speed_mps", 30.0 * 1000.0 / 3600.0);
      sc.devices.push_back(d);
    }
  }
  if (sc.devices.empty()) throw Error("scenario document: no devices");
  for (const auto& d : sc.devices)
    if (d.tier_factor < 1.0)
      throw Error("scenario document: tier_factor below 1 would break the "
                  "server-strength assumption");

  if (doc.contains("rate_table")) {
    RateTable table;
    for (const auto& row : doc.at("rate_table"))
      table.snr_db_to_bps.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    std::sort(table.snr_db_to_bps.begin(), table.snr_db_to_bps.end());
    sc.rate_table = std::move(table);
  }
  if (sc.epochs < 1 || sc.local_iters < 1)
    throw Error("scenario document: epochs and local_iters must be >= 1");
  return sc;
}

std::string scenario_fixture(Band band) {
  nlohmann::ordered_json doc;
  doc["band"] = to_string(band);
  doc["channel"] = "normal";
  doc["epochs"] = 300;
  doc["local_iters"] = 5;
  doc["seed"] = 1;
  doc["cell_radius_m"] = 250.0;
  doc["epoch_seconds"] = 1.0;
  return doc.dump(2) + "\n";
}

namespace {

struct EpochRealization {
  int device_index = 0;
  LinkSample link;
};

// Round-robin schedule with per-device fading substreams; identical for
// every strategy so per-epoch delays are comparable.
std::vector<EpochRealization> realize_trace(const Scenario& sc) {
  std::vector<std::mt19937_64> streams;
  for (std::size_t i = 0; i < sc.devices.size(); ++i)
    streams.emplace_back(sc.seed * 0x9E3779B97F4A7C15ULL + i * 0xBF58476D1CE4E5B9ULL + 1);
  std::normal_distribution<double> shadow(0.0, sc.sigma_db);
  std::vector<EpochRealization> trace(sc.epochs);
  for (int e = 0; e < sc.epochs; ++e) {
    const int dev = e % static_cast<int>(sc.devices.size());
    const double chi_up = shadow(streams[dev]);
    const double chi_down = shadow(streams[dev]);
    trace[e].device_index = dev;
    trace[e].link = link_rate(sc, sc.devices[dev], e * sc.epoch_seconds, chi_up, chi_down);
  }
  return trace;
}

ModelProfile scale_device_compute(const ModelProfile& p, double factor) {
  ModelProfile scaled = p;
  for (auto& l : scaled.layers)
    l.xi_device_us = static_cast<Micros>(std::llround(double(l.xi_device_us) * factor));
  scaled.finalize();
  return scaled;
}

struct TraceContext {
  const Scenario& sc;
  std::vector<EpochRealization> trace;
  std::map<double, ModelProfile> scaled;  // tier factor -> profile

  TraceContext(const Scenario& sc_in, const ModelProfile& p) : sc(sc_in) {
    trace = realize_trace(sc);
    for (const auto& d : sc.devices)
      if (!scaled.count(d.tier_factor))
        scaled.emplace(d.tier_factor, scale_device_compute(p, d.tier_factor));
  }

  NetParams net_params(int epoch) const {
    NetParams n;
    n.rate_up_Bps = trace[epoch].link.rate_up_Bps;
    n.rate_down_Bps = trace[epoch].link.rate_down_Bps;
    n.local_iters = sc.local_iters;
    return n;
  }
  const ModelProfile& profile(int epoch) const {
    return scaled.at(sc.devices[trace[epoch].device_index].tier_factor);
  }
  EpochReport base_report(int epoch, Strategy s) const {
    EpochReport r;
    r.epoch = epoch;
    r.device_id = sc.devices[trace[epoch].device_index].id;
    r.rate_up_Bps = trace[epoch].link.rate_up_Bps;
    r.rate_down_Bps = trace[epoch].link.rate_down_Bps;
    r.strategy = s;
    return r;
  }
};

Partition all_device_partition(const ModelProfile& p) {
  Partition c;
  for (const auto& l : p.layers) c.device.insert(l.id);
  return c;
}

std::vector<EpochReport> run_proposed(const TraceContext& ctx) {
  std::vector<EpochReport> out;
  for (int e = 0; e < ctx.sc.epochs; ++e) {
    EpochReport r = ctx.base_report(e, Strategy::proposed);
    const SplitDecision d = blockwise_split(ctx.profile(e), ctx.net_params(e));
    r.partition = d.partition;
    r.delay_us = d.delay_us;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EpochReport> run_fixed(const TraceContext& ctx, Strategy s,
                                   const Partition& cut) {
  std::vector<EpochReport> out;
  for (int e = 0; e < ctx.sc.epochs; ++e) {
    EpochReport r = ctx.base_report(e, s);
    r.partition = cut;
    r.delay_us = training_delay(ctx.profile(e), cut, ctx.net_params(e));
    out.push_back(std::move(r));
  }
  return out;
}

constexpr std::size_t kMaxStaticCuts = 200'000;

// Best static cut over the whole trace, plus the per-epoch worst static
// delay for reference.
Partition calibrate_oss(const TraceContext& ctx, const ModelProfile& p,
                        std::vector<Micros>* worst_out) {
  const std::vector<Partition> candidates = consistent_partitions(p, kMaxStaticCuts);
  std::vector<Micros> totals(candidates.size(), 0);
  if (worst_out) worst_out->assign(ctx.sc.epochs, 0);
  for (int e = 0; e < ctx.sc.epochs; ++e) {
    const ModelProfile& profile = ctx.profile(e);
    const NetParams n = ctx.net_params(e);
    Micros worst = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const Micros d = training_delay(profile, candidates[i], n);
      totals[i] = checked_add_us(totals[i], d);
      worst = std::max(worst, d);
    }
    if (worst_out) (*worst_out)[e] = worst;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (totals[i] < totals[best] ||
        (totals[i] == totals[best] &&
         (candidates[i].device.size() < candidates[best].device.size() ||
          (candidates[i].device.size() == candidates[best].device.size() &&
           candidates[i].device < candidates[best].device))))
      best = i;
  }
  return candidates[best];
}

}  // namespace

std::vector<EpochReport> simulate(const Scenario& sc, Strategy strategy,
                                  const ModelProfile& p) {
  TraceContext ctx(sc, p);
  switch (strategy) {
    case Strategy::proposed:
      return run_proposed(ctx);
    case Strategy::oss:
      return run_fixed(ctx, Strategy::oss, calibrate_oss(ctx, p, nullptr));
    case Strategy::device_only:
      return run_fixed(ctx, Strategy::device_only, all_device_partition(p));
  }
  throw Error("simulate: unknown strategy");
}

ComparisonReport simulate_compare(const Scenario& sc, const ModelProfile& p) {
  TraceContext ctx(sc, p);
  ComparisonReport report;
  report.oss_partition = calibrate_oss(ctx, p, &report.worst_static_us);
  report.proposed = run_proposed(ctx);
  report.oss = run_fixed(ctx, Strategy::oss, report.oss_partition);
  report.device_only = run_fixed(ctx, Strategy::device_only, all_device_partition(p));
  return report;
}

void write_reports_csv(std::ostream& os, const std::vector<EpochReport>& reports) {
  os << "epoch,device,R_D,R_S,strategy,cut_size,delay_us\n";
  for (const auto& r : reports) {
    os << r.epoch << ',' << r.device_id << ',' << r.rate_up_Bps << ','
       << r.rate_down_Bps << ',' << to_string(r.strategy) << ','
       << r.partition.device.size() << ',' << r.delay_us << '\n';
  }
}

std::string summary_json(const ComparisonReport& report) {
  auto total = [](const std::vector<EpochReport>& rs) {
    Micros t = 0;
    for (const auto& r : rs) t = checked_add_us(t, r.delay_us);
    return t;
  };
  const Micros proposed = total(report.proposed);
  const Micros oss = total(report.oss);
  const Micros device_only = total(report.device_only);
  auto reduction = [&](Micros other) {
    return other == 0 ? 0.0 : 100.0 * (1.0 - double(proposed) / double(other));
  };
  nlohmann::ordered_json doc;
  doc["epochs"] = report.proposed.size();
  doc["total_delay_us"] = {{"proposed", proposed},
                           {"oss", oss},
                           {"device_only", device_only}};
  doc["reduction_pct_vs"] = {{"oss", reduction(oss)},
                             {"device_only", reduction(device_only)}};
  nlohmann::ordered_json cut = nlohmann::ordered_json::array();
  for (const auto& id : report.oss_partition.device) cut.push_back(id);
  doc["oss_device_set"] = cut;
  return doc.dump(2) + "\n";
}

}  // namespace splitflow
