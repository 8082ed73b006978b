#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fflab/adversary.hpp"
#include "fflab/properties.hpp"
#include "fflab/scenario.hpp"
#include "fflab/simnet.hpp"
#include "fflab/trace_io.hpp"
#include "oracles.hpp"

namespace {

using namespace fflab;

bool verbose() {
  const char* v = std::getenv("FFLAB_LOG");
  return v && std::string(v) != "quiet" && std::string(v) != "0";
}

void print_verdicts(const std::vector<Verdict>& verdicts) {
  for (const Verdict& v : verdicts) {
    const char* st = v.status == Verdict::Status::pass   ? "pass"
                     : v.status == Verdict::Status::fail ? "FAIL"
                                                         : "skip";
    std::cout << "  " << v.name << ": " << st;
    if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
    std::cout << "\n";
  }
}

int cmd_run(const std::string& file, const std::string& out_dir) {
  SimConfig cfg = load_scenario_file(file);
  std::cout << "scenario " << file << " (eta = " << cfg.eta() << ")\n";
  Trace trace = run_simulation(cfg);
  auto verdicts = run_all_checks(trace);
  auto metrics = latency_metrics(trace);
  print_verdicts(verdicts);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::string stem = out_dir + "/seed" + std::to_string(cfg.seed);
    write_file(stem + ".trace", serialize_trace(trace));
    write_file(stem + ".verdicts", serialize_verdicts(verdicts));
    write_file(stem + ".metrics", serialize_metrics(metrics));
    std::cout << "wrote " << stem << ".{trace,verdicts,metrics}\n";
  }

  for (const Verdict& v : verdicts)
    if (v.failed()) return 1;
  return 0;
}

int cmd_fuzz(const std::string& file, std::uint32_t runs, std::uint64_t seed) {
  SimConfig base = load_scenario_file(file);
  std::uint32_t failures = 0;
  for (std::uint32_t i = 0; i < runs; ++i) {
    SimConfig cfg = base;
    cfg.seed = hash_combine(seed, i);
    FuzzSchedule sched = generate_compliant_sleep(cfg, hash_combine(seed, 0x5eedull + i));
    if (!sched.compliant) {
      std::cout << "run " << i << ": no compliant schedule found\n";
      ++failures;
      continue;
    }
    cfg.sleep = sched.sleep;
    Trace trace = run_simulation(cfg);
    auto verdicts = run_all_checks(trace);
    bool failed = false;
    for (const Verdict& v : verdicts) failed = failed || v.failed();
    if (failed || verbose()) {
      std::cout << "run " << i << " seed " << cfg.seed << (failed ? " FAILED" : " ok") << "\n";
      if (failed) print_verdicts(verdicts);
    }
    if (failed) ++failures;
  }
  std::cout << "fuzz: " << runs << " runs, " << failures << " failures\n";
  return failures ? 1 : 0;
}

int cmd_oracle(const std::string& kind, std::uint32_t cases, std::uint64_t seed) {
  std::uint32_t mismatches = 0;
  for (std::uint32_t i = 0; i < cases; ++i) {
    std::uint64_t s = hash_combine(seed, i);
    if (kind == "forkchoice") {
      auto fx = oracle::random_forkchoice_fixture(s);
      ChainRef got = mfc(fx.v, fx.v_prime, fx.root, fx.t, fx.eta);
      ChainRef want = oracle::mfc_brute(fx.v, fx.v_prime, fx.root, fx.t, fx.eta);
      if (got != want) ++mismatches;
      ChainRef g2 = rlmd_ghost(fx.v_prime, fx.root, fx.t, fx.eta);
      ChainRef w2 = oracle::rlmd_ghost_brute(fx.v_prime, fx.root, fx.t, fx.eta);
      if (g2 != w2) ++mismatches;
    } else if (kind == "ffg") {
      auto fx = oracle::random_ffg_fixture(s);
      if (justified_set(fx.v_prime, fx.n) != oracle::justified_brute(fx.v_prime, fx.n))
        ++mismatches;
      if (finalized_set(fx.v_prime, fx.n) != oracle::finalized_brute(fx.v_prime, fx.n))
        ++mismatches;
    } else {
      std::cerr << "unknown oracle kind: " << kind << "\n";
      return 2;
    }
  }
  std::cout << "oracle " << kind << ": " << cases << " cases, " << mismatches
            << " mismatches\n";
  return mismatches ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consensus protocol laboratory"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir, kind;
  std::uint32_t runs = 100, cases = 1000;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "run one scenario and check all properties");
  run->add_option("file", scenario_file, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory for trace/verdicts/metrics");

  auto* fuzz = app.add_subcommand("fuzz", "run randomized compliant schedules");
  fuzz->add_option("file", scenario_file, "base scenario file")->required();
  fuzz->add_option("--runs", runs, "number of runs");
  fuzz->add_option("--seed", seed, "fuzz seed");

  auto* orc = app.add_subcommand("oracle", "brute-force oracle equivalence suites");
  orc->add_option("kind", kind, "forkchoice | ffg")->required();
  orc->add_option("--cases", cases, "number of cases");
  orc->add_option("--seed", seed, "case seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(scenario_file, out_dir);
    if (fuzz->parsed()) return cmd_fuzz(scenario_file, runs, seed);
    if (orc->parsed()) return cmd_oracle(kind, cases, seed);
  } catch (const fflab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
