// Command-line front-end. All simulator functionality comes through the
// shared library's C interface (sconna.h); this binary only parses
// arguments, shuttles files and assembles run manifests.

#include <sconna.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  int exit_code;
  explicit CliError(const std::string& what, int code = 1)
      : std::runtime_error(what), exit_code(code) {}
};

void check(sconna_status st, const std::string& context) {
  if (st == SCONNA_OK) return;
  std::ostringstream msg;
  msg << context << ": " << sconna_status_name(st);
  const char* detail = sconna_last_error();
  if (detail && *detail) msg << ": " << detail;
  throw CliError(msg.str(), st == SCONNA_ERR_VALIDATION ? 3 : 2);
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  sconna_string_free(s);
  return out;
}

// content digest recorded in run manifests (fnv1a64, hex)
std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> presets;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest

  json core() const {  // hashed content; excludes the timestamp
    json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["presets"] = presets;
    j["seed"] = seed;
    j["output_dir"] = out_dir;
    j["tool_version"] = sconna_version();
    return j;
  }
};

class OutputWriter {
 public:
  OutputWriter(const std::string& out_dir, RunManifest manifest)
      : dir_(out_dir), manifest_(std::move(manifest)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  // Writes content under the output directory (when set) and records it in
  // the manifest. Returns whether a file was produced.
  bool write(const std::string& filename, const std::string& content) {
    if (dir_.empty()) return false;
    const fs::path path = fs::path(dir_) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("cannot write " + path.string());
    out << content;
    manifest_.outputs.emplace_back(filename, fnv1a64_hex(content));
    return true;
  }

  // Embeds the manifest core into a JSON payload before writing.
  bool write_json_with_manifest(const std::string& filename,
                                const std::string& json_text) {
    if (dir_.empty()) return false;
    json j = json::parse(json_text);
    j["manifest"] = manifest_.core();
    return write(filename, j.dump(1) + "\n");
  }

  void finalize() {
    if (dir_.empty()) return;
    json j = manifest_.core();
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    j["timestamp_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    j["outputs"] = json::array();
    for (const auto& [path, digest] : manifest_.outputs)
      j["outputs"].push_back({{"path", path}, {"digest_fnv1a64", digest}});
    const fs::path path = fs::path(dir_) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << j.dump(1) << "\n";
  }

 private:
  std::string dir_;
  RunManifest manifest_;
};

// Accelerator lookup order: explicit file path, built-in preset, then
// $SCONNA_PRESET_DIR/<name>.json.
sconna_accelerator* open_accelerator(const std::string& name) {
  sconna_accelerator* acc = nullptr;
  if (fs::exists(name) && fs::is_regular_file(name)) {
    check(sconna_accelerator_from_file(name.c_str(), &acc),
          "loading accelerator " + name);
    return acc;
  }
  const sconna_status st = sconna_accelerator_from_preset(name.c_str(), &acc);
  if (st == SCONNA_OK) return acc;
  if (st == SCONNA_ERR_UNKNOWN_PRESET) {
    if (const char* dir = std::getenv("SCONNA_PRESET_DIR")) {
      const fs::path candidate = fs::path(dir) / (name + ".json");
      if (fs::exists(candidate)) {
        check(sconna_accelerator_from_file(candidate.string().c_str(), &acc),
              "loading accelerator " + candidate.string());
        return acc;
      }
    }
    char* names = nullptr;
    sconna_preset_names(&names);
    throw CliError("unknown accelerator \"" + name +
                   "\"; available presets:\n" + take_string(names));
  }
  check(st, "loading accelerator " + name);
  return nullptr;
}

double parse_rate(const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CliError("cannot parse rate \"" + text + "\"");
  }
}

void print_json_or_csv(const std::string& json_text, const std::string& csv_text,
                       const std::string& format) {
  std::cout << (format == "csv" ? csv_text : json_text) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sconna: scalability solver and performance simulator for "
               "stochastic-computing optical CNN accelerators"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir;
  std::string format = "json";
  app.add_option("--seed", seed, "random seed for seeded commands");
  app.add_option("--out", out_dir, "output directory for result files");
  app.add_option("--format", format, "stdout format")
      ->check(CLI::IsMember({"json", "csv"}));

  // solve ---------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "optical link budget and max VDPE size");
  std::string params_file;
  unsigned solve_bits = 8;
  double solve_br = 30e9;
  double pin_ppd = std::nan("");
  std::string dr_interp = "br2b";
  std::vector<std::string> sweep_br;
  bool wall_plug = false;
  solve->add_option("--params", params_file, "link parameter JSON file");
  solve->add_option("--B", solve_bits, "stream precision bits")->check(CLI::PositiveNumber);
  solve->add_option("--BR", solve_br, "bitrate in Hz");
  solve->add_option("--pin-ppd", pin_ppd, "pin the photodetector sensitivity (dBm)");
  solve->add_option("--dr-interpretation", dr_interp,
                    "receiver bandwidth rule: br2b (BR*2^B) or br")
      ->check(CLI::IsMember({"br2b", "br"}));
  solve->add_option("--sweep", sweep_br, "bitrates (Hz) for a sweep CSV")->delimiter(',');
  solve->add_flag("--wall-plug", wall_plug, "include wall-plug efficiency in the budget");

  // stats ---------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "kernel census of a network descriptor");
  std::string stats_network;
  std::uint64_t threshold = 44;
  stats->add_option("network", stats_network, "network JSON file")->required();
  stats->add_option("--threshold", threshold, "flattened-size threshold")
      ->check(CLI::PositiveNumber);

  // functional -----------------------------------------------------------
  auto* functional = app.add_subcommand(
      "functional", "stochastic VDP error statistics against the exact dot product");
  std::size_t func_length = 176;
  unsigned func_bits = 8;
  std::uint64_t func_trials = 1000;
  std::string adc_mode = "on";
  std::string export_lut;
  functional->add_option("--length", func_length, "vector length");
  functional->add_option("--B", func_bits, "precision bits");
  functional->add_option("--trials", func_trials, "number of random trials");
  functional->add_option("--adc", adc_mode, "converter noise on|off")
      ->check(CLI::IsMember({"on", "off"}));
  functional->add_option("--export-lut", export_lut,
                         "also export the operand LUT to this binary file");

  // simulate --------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "run one network on one instance");
  std::string sim_network, sim_accel = "sconna-paper";
  bool sim_validate = false;
  simulate->add_option("network", sim_network, "network JSON file")->required();
  simulate->add_option("--accel", sim_accel, "accelerator preset or JSON file");
  simulate->add_flag("--bitexact-validate", sim_validate,
                     "cross-check sampled dot products through the bit-exact datapath");

  // compare ---------------------------------------------------------------
  auto* compare = app.add_subcommand("compare",
                                     "multi-network, multi-instance comparison");
  std::vector<std::string> cmp_networks;
  std::vector<std::string> cmp_accels = {"sconna-paper", "mam-holylight",
                                         "amm-deapcnn"};
  compare->add_option("networks", cmp_networks, "network JSON files")->required();
  compare->add_option("--accels", cmp_accels,
                      "accelerator presets/files; first is the reference")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      sconna_link_params* params = nullptr;
      if (params_file.empty())
        check(sconna_link_params_create(&params), "default parameters");
      else
        check(sconna_link_params_from_file(params_file.c_str(), &params),
              "loading " + params_file);
      if (solve_br <= 0) throw CliError("--BR must be positive");

      RunManifest manifest;
      manifest.command = "solve";
      if (!params_file.empty()) manifest.inputs.push_back(params_file);
      manifest.seed = seed;
      manifest.out_dir = out_dir;
      OutputWriter writer(out_dir, manifest);

      char* report = nullptr;
      const sconna_status st = sconna_solve_report(
          params, solve_bits, solve_br, 1.0, pin_ppd, wall_plug ? 1 : 0, &report);
      const std::string report_text = take_string(report);
      if (st != SCONNA_OK && report_text.empty())
        check(st, "solve");
      std::cout << report_text << "\n";
      writer.write_json_with_manifest("solve_report.json", report_text);

      if (!sweep_br.empty()) {
        std::vector<double> rates;
        for (const auto& s : sweep_br) rates.push_back(parse_rate(s));
        char* csv = nullptr;
        check(sconna_solve_sweep(params, solve_bits, rates.data(), rates.size(),
                                 dr_interp == "br" ? SCONNA_DR_BITRATE_ONLY
                                                   : SCONNA_DR_BITRATE_TIMES_2_POW_B,
                                 1.0, pin_ppd, &csv),
              "sweep");
        const std::string csv_text = take_string(csv);
        if (!writer.write("solve_sweep.csv", csv_text)) std::cout << csv_text;
      }
      writer.finalize();
      sconna_link_params_free(params);
      if (st != SCONNA_OK)
        throw CliError("link budget infeasible; see the ledger above", 4);
      return 0;
    }

    if (*stats) {
      sconna_network* net = nullptr;
      check(sconna_network_from_file(stats_network.c_str(), &net),
            "loading " + stats_network);
      std::uint64_t le = 0, gt = 0;
      check(sconna_network_stats(net, threshold, &le, &gt), "stats");
      char* name = nullptr;
      sconna_network_name(net, &name);
      const std::string net_name = take_string(name);
      sconna_network_free(net);

      json j{{"network", net_name},
             {"threshold", threshold},
             {"kernels_at_or_below", le},
             {"kernels_above", gt},
             {"total", le + gt}};
      std::ostringstream csv;
      csv << "network,threshold,kernels_at_or_below,kernels_above,total\n"
          << net_name << "," << threshold << "," << le << "," << gt << ","
          << (le + gt) << "\n";
      print_json_or_csv(j.dump(1), csv.str(), format);

      RunManifest manifest;
      manifest.command = "stats";
      manifest.inputs.push_back(stats_network);
      manifest.seed = seed;
      manifest.out_dir = out_dir;
      OutputWriter writer(out_dir, manifest);
      writer.write("stats.json", j.dump(1) + "\n");
      writer.write("stats.csv", csv.str());
      writer.finalize();
      return 0;
    }

    if (*functional) {
      if (func_trials == 0) throw CliError("--trials must be >= 1");
      char* report = nullptr;
      check(sconna_functional_report(func_length, func_bits, func_trials, seed,
                                     adc_mode == "on" ? 1 : 0, &report),
            "functional study");
      const std::string report_text = take_string(report);
      std::cout << report_text << "\n";
      if (!export_lut.empty()) {
        check(sconna_lut_export(func_bits, export_lut.c_str()),
              "LUT export to " + export_lut);
        std::cerr << "wrote operand LUT to " << export_lut << "\n";
      }

      RunManifest manifest;
      manifest.command = "functional";
      manifest.seed = seed;
      manifest.out_dir = out_dir;
      OutputWriter writer(out_dir, manifest);
      writer.write_json_with_manifest("functional_report.json", report_text);
      writer.finalize();
      return 0;
    }

    if (*simulate) {
      sconna_network* net = nullptr;
      check(sconna_network_from_file(sim_network.c_str(), &net),
            "loading " + sim_network);
      sconna_accelerator* acc = open_accelerator(sim_accel);

      char* summary = nullptr;
      char* layers = nullptr;
      check(sconna_simulate(net, acc, sim_validate ? 1 : 0, seed, &summary,
                            &layers),
            "simulate");
      const std::string summary_text = take_string(summary);
      const std::string layers_text = take_string(layers);
      sconna_network_free(net);
      sconna_accelerator_free(acc);

      print_json_or_csv(summary_text, layers_text, format);

      RunManifest manifest;
      manifest.command = "simulate";
      manifest.inputs.push_back(sim_network);
      manifest.presets.push_back(sim_accel);
      manifest.seed = seed;
      manifest.out_dir = out_dir;
      OutputWriter writer(out_dir, manifest);
      writer.write_json_with_manifest("summary.json", summary_text);
      writer.write("layers.csv", layers_text);
      writer.finalize();
      return 0;
    }

    if (*compare) {
      std::vector<sconna_network*> nets;
      for (const auto& path : cmp_networks) {
        sconna_network* net = nullptr;
        check(sconna_network_from_file(path.c_str(), &net), "loading " + path);
        nets.push_back(net);
      }
      std::vector<sconna_accelerator*> accs;
      for (const auto& name : cmp_accels) accs.push_back(open_accelerator(name));

      char* cmp_json = nullptr;
      char* ratio_csv = nullptr;
      char* long_csv = nullptr;
      check(sconna_compare(
                const_cast<const sconna_network* const*>(nets.data()),
                nets.size(),
                const_cast<const sconna_accelerator* const*>(accs.data()),
                accs.size(), seed, &cmp_json, &ratio_csv, &long_csv),
            "compare");
      const std::string json_text = take_string(cmp_json);
      const std::string ratio_text = take_string(ratio_csv);
      const std::string long_text = take_string(long_csv);
      for (auto* n : nets) sconna_network_free(n);
      for (auto* a : accs) sconna_accelerator_free(a);

      print_json_or_csv(json_text, ratio_text, format);

      RunManifest manifest;
      manifest.command = "compare";
      manifest.inputs = cmp_networks;
      manifest.presets = cmp_accels;
      manifest.seed = seed;
      manifest.out_dir = out_dir;
      OutputWriter writer(out_dir, manifest);
      writer.write_json_with_manifest("comparison.json", json_text);
      writer.write("ratios.csv", ratio_text);
      writer.write("metrics_long.csv", long_text);
      writer.finalize();
      return 0;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
