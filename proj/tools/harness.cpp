#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "grounded/error.hpp"
#include "grounded/harness/criteria.hpp"
#include "grounded/harness/protocols.hpp"
#include "grounded/harness/scenario.hpp"
#include "grounded/server/server.hpp"

using namespace grounded;

namespace {

server::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grounded instruction harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an evaluation category");
  std::string category, config_file, report_file;
  std::uint64_t seed = 1;
  int runs = 0;
  bool trace = false;
  run->add_option("--category", category, "nouns|color|size|shape|prepositions|verbs|combined")->required();
  run->add_option("--seed", seed);
  run->add_option("--runs", runs);
  run->add_option("--config", config_file);
  run->add_option("--report", report_file);
  run->add_flag("--trace", trace, "print every exchange to stderr");

  auto* scen = app.add_subcommand("scenario", "replay a scripted session and check its assertions");
  std::string scenario_file, transcript_file;
  scen->add_option("file", scenario_file)->required();
  scen->add_option("--transcript", transcript_file, "write the transcript here instead of stdout");

  auto* serve = app.add_subcommand("serve", "serve sessions over http");
  server::ServerOptions opts;
  serve->add_option("--host", opts.host);
  serve->add_option("--port", opts.port);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      harness::HarnessConfig cfg;
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw FormatError("cannot read " + config_file);
        try {
          cfg = harness::config_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
          throw FormatError(config_file + ": " + e.what());
        }
      }
      if (runs > 0) cfg.runs = runs;
      if (trace) harness::set_trace(&std::cerr);
      auto rep = harness::run_category(category, cfg, seed);
      auto j = harness::report_to_json(rep);
      auto criteria = harness::category_criteria(rep);
      bool ok = true;
      for (auto& c : criteria) {
        j["criteria"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        ok = ok && c.pass;
      }
      if (!report_file.empty()) std::ofstream(report_file) << j.dump(2) << "\n";
      else std::cout << j.dump(2) << "\n";
      return ok ? 0 : 1;
    }
    if (*scen) {
      auto s = harness::load_scenario(scenario_file);
      try {
        auto t = harness::run_scenario(s);
        if (!transcript_file.empty()) std::ofstream(transcript_file) << t.dump(2) << "\n";
        else std::cout << t.dump(2) << "\n";
      } catch (const AssertionFailure& e) {
        std::cerr << "assertion failed: " << e.what() << "\n";
        return 1;
      }
      return 0;
    }
    if (*serve) {
      server::Server srv(opts);
      g_server = &srv;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      int port = srv.bind();
      if (port < 0) throw FormatError("cannot bind " + opts.host + ":" + std::to_string(opts.port));
      std::cerr << "serving on http://" << opts.host << ":" << port << "\n";
      srv.listen_after_bind();
      g_server = nullptr;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
