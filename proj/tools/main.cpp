#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "splitflow/blockwise.hpp"
#include "splitflow/edgesim.hpp"
#include "splitflow/fixtures.hpp"
#include "splitflow/oracle.hpp"
#include "splitflow/randgen.hpp"
#include "splitflow/splitter.hpp"

namespace {

using namespace splitflow;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string default_out_dir() {
  const char* env = std::getenv("SPLITFLOW_OUT_DIR");
  return env && *env ? env : ".";
}

nlohmann::ordered_json partition_json(const Partition& c) {
  nlohmann::ordered_json device = nlohmann::ordered_json::array();
  device.push_back(kInputId);
  for (const auto& id : c.device) device.push_back(id);
  return device;
}

int run_split(const std::string& profile_path, Bytes rate_up, Bytes rate_down,
              int iters, bool blockwise, const std::string& mode, bool no_input_cost,
              const std::string& dot_path) {
  ModelProfile p = parse_model_profile(read_file(profile_path));
  const auto diagnostics = validate_profile(p);
  for (const auto& d : diagnostics)
    std::cerr << "diagnostic: " << d.subject << ": " << d.rule << ": " << d.detail
              << "\n";
  if (!diagnostics.empty()) return 1;

  NetParams n;
  n.rate_up_Bps = rate_up;
  n.rate_down_Bps = rate_down;
  n.local_iters = iters;
  n.input_cost = !no_input_cost;
  if (mode == "consistent") n.weight_mode = WeightMode::consistent;
  else if (mode == "paper-literal") n.weight_mode = WeightMode::paper_literal;
  else throw Error("--mode must be consistent or paper-literal");

  if (!dot_path.empty())
    write_file(dot_path, to_dot(restructure(build_split_dag(p, n))));

  const SplitDecision d = blockwise ? blockwise_split(p, n) : optimal_split(p, n);

  nlohmann::ordered_json out;
  out["model"] = p.model_name;
  out["method"] = to_string(d.method);
  out["mode"] = mode;
  out["device_set"] = partition_json(d.partition);
  nlohmann::ordered_json server = nlohmann::ordered_json::array();
  for (const auto& l : p.layers)
    if (!d.partition.on_device(l.id)) server.push_back(l.id);
  out["server_set"] = server;
  out["cut_value_us"] = d.cut_value_us;
  out["delay_us"] = d.delay_us;
  std::cout << out.dump(2) << "\n";

  std::cerr << "model " << p.model_name << ": " << d.partition.device.size()
            << " device layer(s) + input, " << server.size()
            << " server layer(s), delay " << d.delay_us << " us ("
            << to_string(d.method) << ")\n";
  return 0;
}

int run_validate(const std::string& profile_path) {
  ModelProfile p = parse_model_profile(read_file(profile_path));
  const auto diagnostics = validate_profile(p);
  nlohmann::ordered_json out;
  out["model"] = p.model_name;
  out["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : diagnostics) {
    out["diagnostics"].push_back(
        {{"subject", d.subject}, {"rule", d.rule}, {"detail", d.detail}});
    std::cerr << d.subject << ": " << d.rule << ": " << d.detail << "\n";
  }
  std::cout << out.dump(2) << "\n";
  std::cerr << (diagnostics.empty() ? "profile is valid\n"
                                    : std::to_string(diagnostics.size()) +
                                          " diagnostic(s)\n");
  return diagnostics.empty() ? 0 : 1;
}

int run_oracle_check(int seeds, int max_layers, bool with_blocks) {
  int matched = 0;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (int s = 0; s < seeds; ++s) {
    RandomProfileOptions opt;
    opt.max_layers = max_layers;
    opt.with_blocks = with_blocks;
    const ModelProfile p = random_profile(s, opt);
    const NetParams n = random_net_params(s);
    const SplitDecision expected = oracle_optimal(p, n);
    const SplitDecision got =
        with_blocks ? blockwise_split(p, n) : optimal_split(p, n);
    if (got.delay_us == expected.delay_us) {
      ++matched;
    } else {
      failures.push_back({{"seed", s},
                          {"oracle_delay_us", expected.delay_us},
                          {"split_delay_us", got.delay_us}});
    }
  }
  nlohmann::ordered_json out;
  out["seeds"] = seeds;
  out["max_layers"] = max_layers;
  out["blockwise"] = with_blocks;
  out["matched"] = matched;
  out["mismatched"] = seeds - matched;
  out["failures"] = failures;
  std::cout << out.dump(2) << "\n";
  std::cerr << matched << "/" << seeds << " match\n";
  return matched == seeds ? 0 : 1;
}

int run_simulate(const std::string& scenario_path, const std::string& profile_path,
                 const std::string& strategy, std::string out_dir) {
  const Scenario sc = load_scenario(read_file(scenario_path));
  ModelProfile p = parse_model_profile(read_file(profile_path));
  const auto diagnostics = validate_profile(p);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics)
      std::cerr << d.subject << ": " << d.rule << ": " << d.detail << "\n";
    return 1;
  }
  if (out_dir.empty()) out_dir = default_out_dir();
  std::filesystem::create_directories(out_dir);

  auto write_strategy = [&](const std::vector<EpochReport>& reports,
                            const std::string& name) {
    std::ofstream os(out_dir + "/" + name + ".csv");
    write_reports_csv(os, reports);
  };

  if (strategy == "all") {
    const ComparisonReport report = simulate_compare(sc, p);
    write_strategy(report.proposed, "proposed");
    write_strategy(report.oss, "oss");
    write_strategy(report.device_only, "device-only");
    const std::string summary = summary_json(report);
    write_file(out_dir + "/summary.json", summary);
    std::cout << summary;
    std::cerr << "wrote proposed/oss/device-only CSVs and summary.json to "
              << out_dir << "\n";
    return 0;
  }

  Strategy s;
  if (strategy == "proposed") s = Strategy::proposed;
  else if (strategy == "oss") s = Strategy::oss;
  else if (strategy == "device-only") s = Strategy::device_only;
  else throw Error("--strategy must be proposed|oss|device-only|all");
  const auto reports = simulate(sc, s, p);
  write_strategy(reports, strategy);
  Micros total = 0;
  for (const auto& r : reports) total = checked_add_us(total, r.delay_us);
  nlohmann::ordered_json out;
  out["strategy"] = strategy;
  out["epochs"] = reports.size();
  out["total_delay_us"] = total;
  std::cout << out.dump(2) << "\n";
  std::cerr << "wrote " << reports.size() << " epochs to " << out_dir << "/"
            << strategy << ".csv\n";
  return 0;
}

int run_gen_fixture(const std::string& name, const std::string& out_path, bool list) {
  if (list) {
    for (const auto& n : fixture_names()) std::cout << n << "\n";
    std::cout << "scenario-sub6\nscenario-mmwave\n";
    return 0;
  }
  std::string text;
  if (name == "scenario-sub6") text = scenario_fixture(Band::sub6);
  else if (name == "scenario-mmwave") text = scenario_fixture(Band::mmwave);
  else text = serialize_profile(make_fixture(name));
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"split-learning model splitting over flow graphs"};
  app.require_subcommand(1);

  auto* split = app.add_subcommand("split", "compute the optimal device/server split");
  std::string profile_path, mode = "consistent", dot_path;
  Bytes rate_up = 1'000'000, rate_down = 1'000'000;
  int iters = 1;
  bool use_blockwise = false, no_input_cost = false;
  split->add_option("--profile", profile_path, "profile document")->required();
  split->add_option("--rate-up", rate_up, "device->server rate, bytes/s");
  split->add_option("--rate-down", rate_down, "server->device rate, bytes/s");
  split->add_option("--iters", iters, "local iterations per epoch");
  split->add_flag("--blockwise", use_blockwise, "use block-wise splitting");
  split->add_option("--mode", mode, "consistent|paper-literal");
  split->add_flag("--no-input-cost", no_input_cost,
                  "ignore raw-input transfer (drops the input vertex)");
  split->add_option("--dot", dot_path, "write the restructured DAG as Graphviz");

  auto* validate = app.add_subcommand("validate", "check a profile document");
  std::string validate_path;
  validate->add_option("--profile", validate_path, "profile document")->required();

  auto* oracle = app.add_subcommand("oracle-check",
                                    "compare the splitter against brute force");
  int seeds = 1000, max_layers = 12;
  bool oracle_blocks = false;
  oracle->add_option("--seeds", seeds, "number of random instances");
  oracle->add_option("--max-layers", max_layers, "layer bound per instance");
  oracle->add_flag("--blockwise", oracle_blocks, "exercise the block-wise path");

  auto* simulate = app.add_subcommand("simulate", "run the edge-network simulator");
  std::string scenario_path, sim_profile, strategy = "all", out_dir;
  simulate->add_option("--scenario", scenario_path, "scenario document")->required();
  simulate->add_option("--profile", sim_profile, "profile document")->required();
  simulate->add_option("--strategy", strategy, "proposed|oss|device-only|all");
  simulate->add_option("--out", out_dir,
                       "output directory (default $SPLITFLOW_OUT_DIR or .)");

  auto* gen = app.add_subcommand("gen-fixture", "emit a built-in fixture");
  std::string fixture_name, fixture_out;
  bool list_fixtures = false;
  gen->add_option("name", fixture_name, "fixture name");
  gen->add_option("--out", fixture_out, "output file (default stdout)");
  gen->add_flag("--list", list_fixtures, "list fixture names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (split->parsed())
      return run_split(profile_path, rate_up, rate_down, iters, use_blockwise, mode,
                       no_input_cost, dot_path);
    if (validate->parsed()) return run_validate(validate_path);
    if (oracle->parsed()) return run_oracle_check(seeds, max_layers, oracle_blocks);
    if (simulate->parsed())
      return run_simulate(scenario_path, sim_profile, strategy, out_dir);
    if (gen->parsed()) {
      if (!list_fixtures && fixture_name.empty())
        throw Error("gen-fixture: name required (or --list)");
      return run_gen_fixture(fixture_name, fixture_out, list_fixtures);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
