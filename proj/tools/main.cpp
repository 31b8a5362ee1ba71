#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsdpi/harness.hpp"
#include "bsdpi/io.hpp"
#include "bsdpi/matcore.hpp"

namespace {

std::vector<int> parse_dims(const std::string& text)
{
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int d = 0;
    try {
      d = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw bsdpi::Error(bsdpi::ErrorKind::ConfigError, "bad dimension '" + item + "' in --dims");
    }
    dims.push_back(d);
  }
  return dims;
}

std::vector<std::string> split_commas(const std::string& text)
{
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(item);
  }
  return out;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"BS-entropy, f-divergences, recovery maps and strengthened DPI bounds"};
  app.require_subcommand(1);

  // divergence
  auto* div = app.add_subcommand("divergence", "divergences of a pair of states read from JSON");
  std::vector<std::string> state_files;
  std::string div_family = "xlogx";
  div->add_option("states", state_files, "sigma.json rho.json")->required()->expected(2);
  div->add_option("--family", div_family, "bs|xlogx|negpower:<beta>|square|neglog");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "randomized bound campaign");
  std::string config_path;
  std::uint64_t seed = 1;
  int trials = 0;
  std::string dims;
  std::string families;
  std::string channel;
  std::string out_path;
  double tol = -1.0;
  int jobs = 0;
  std::string fixture;
  bounds->add_option("--config", config_path, "JSON config; flags override its fields");
  auto* seed_opt = bounds->add_option("--seed", seed, "campaign seed");
  bounds->add_option("--trials", trials, "number of trials");
  bounds->add_option("--dims", dims, "comma-separated dimensions, e.g. 2,3,4");
  bounds->add_option("--family", families, "comma-separated: bs, xlogx, negpower:<beta>");
  bounds->add_option("--channel", channel, "pinching|partial_trace|random_cptp");
  bounds->add_option("--out", out_path, "CSV output path");
  bounds->add_option("--tol", tol, "slack tolerance");
  bounds->add_option("--jobs", jobs, "worker threads");
  bounds->add_option("--fixture", fixture, "random|equal");

  // certify
  auto* cert = app.add_subcommand("certify", "equality residuals for (sigma, rho, T)");
  std::vector<std::string> cert_files;
  std::string cert_out;
  cert->add_option("files", cert_files, "sigma.json rho.json channel.json")->required()->expected(3);
  cert->add_option("--out", cert_out, "also write the JSON report here");

  // selftest
  auto* self = app.add_subcommand("selftest", "module invariants and all campaigns at reduced counts");
  std::uint64_t self_seed = 1;
  bool inject_fault = false;
  self->add_option("--seed", self_seed, "campaign seed");
  self->add_flag("--inject-eig-fault", inject_fault)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*div) {
      bsdpi::harness::cmd_divergence(std::cout, state_files[0], state_files[1], div_family);
      return 0;
    }

    if (*bounds) {
      bsdpi::harness::CampaignConfig cfg;
      if (!config_path.empty()) {
        cfg = bsdpi::harness::load_config(config_path);
      }
      if (*seed_opt) {
        cfg.seed = seed;
      }
      if (bounds->count("--trials")) {
        cfg.trials = trials;
      }
      if (!dims.empty()) {
        cfg.dims = parse_dims(dims);
      }
      if (!families.empty()) {
        cfg.families = split_commas(families);
      }
      if (!channel.empty()) {
        cfg.channel_kind = bsdpi::harness::parse_channel_kind(channel);
      }
      if (!out_path.empty()) {
        cfg.output_path = out_path;
      }
      if (bounds->count("--tol")) {
        cfg.tolerances.slack = tol;
      }
      if (bounds->count("--jobs")) {
        cfg.jobs = jobs;
      }
      if (!fixture.empty()) {
        cfg.fixture = bsdpi::harness::parse_fixture(fixture);
      }
      const auto summary = bsdpi::harness::run_bounds(cfg);
      if (!cfg.output_path.empty()) {
        bsdpi::io::write_text_file(cfg.output_path, bsdpi::io::csv_document(summary.rows));
      }
      bsdpi::harness::print_summary(std::cout, cfg, summary);
      return summary.ok() ? 0 : 1;
    }

    if (*cert) {
      const auto result = bsdpi::harness::certify(cert_files[0], cert_files[1], cert_files[2]);
      if (!cert_out.empty()) {
        bsdpi::io::write_text_file(cert_out, result.document.dump(2) + "\n");
      }
      bsdpi::harness::cmd_certify(std::cout, result);
      return 0;
    }

    if (*self) {
      if (inject_fault) {
        // loosen the Jacobi stopping rule far past usable accuracy
        bsdpi::testing_hooks::jacobi_threshold_scale = 1e12;
      }
      return bsdpi::harness::cmd_selftest(std::cout, self_seed) ? 0 : 1;
    }
  } catch (const bsdpi::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
