// Batch front-end: single runs, strategy batteries, exhaustive commit-adopt
// sweeps, and the schedule-attribution boundary sweep.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hybridsim/analysis.hpp"
#include "hybridsim/engine.hpp"
#include "hybridsim/inputs.hpp"
#include "hybridsim/serialize.hpp"

namespace {

using namespace hybridsim;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitProtocolViolation = 2;
constexpr int kExitHarnessBug = 3;

struct ModelFlags {
  std::string model = "omission";
  int n = 0;
  int f = 0;
  int m = 0;
  int k = 1;
  int phases = 0;  // 0 = formula default
  std::vector<ProcessorId> fixed;
  bool byz_adopt_any = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--model", flags.model, "omission | byzantine | constrained")
      ->check(CLI::IsMember({"omission", "byzantine", "constrained"}));
  cmd->add_option("--n", flags.n, "processor count")->required();
  cmd->add_option("--f", flags.f, "fixed-fault budget");
  cmd->add_option("--m", flags.m, "mobile-fault budget per round");
  cmd->add_option("--k", flags.k, "vector length (consensus indices)");
  cmd->add_option("--phases", flags.phases,
                  "phase count override (default floor(f*k/(k-m))+2)");
  cmd->add_option("--fixed", flags.fixed,
                  "fixed-set ids (default 1..f)")
      ->delimiter(',');
  cmd->add_flag("--byz-adopt-any", flags.byz_adopt_any,
                "Byzantine value update on any nonzero majority");
}

Config build_config(const ModelFlags& flags) {
  Config cfg = make_config(kind_from_name(flags.model), flags.n, flags.f,
                           flags.m, flags.k, flags.phases, flags.fixed);
  cfg.byz_adopt_any = flags.byz_adopt_any;
  const ConfigCheck check = validate_config(cfg);
  if (!check.ok) {
    std::string msg = "invalid config:";
    for (const Violation& v : check.violations)
      msg += " [" + v.field + ": " + v.reason + "]";
    throw CLI::ValidationError(msg);
  }
  if (!check.sufficient)
    std::cerr << "note: config is below the solvability bound; "
                 "properties are not guaranteed\n";
  return cfg;
}

std::vector<std::vector<Slot>> unanimous_inputs(const Config& cfg,
                                                const std::vector<Slot>& bits) {
  return std::vector<std::vector<Slot>>(static_cast<std::size_t>(cfg.n), bits);
}

std::vector<std::vector<Slot>> parse_inputs(const std::string& spec,
                                            const Config& cfg,
                                            std::uint64_t seed) {
  if (spec == "random") return seeded_inputs(cfg, seed, false);
  if (spec.rfind("unanimous:", 0) == 0) {
    const std::string bits = spec.substr(10);
    if (static_cast<int>(bits.size()) != cfg.k)
      throw CLI::ValidationError("unanimous inputs need exactly k bits");
    std::vector<Slot> v;
    for (char c : bits) {
      if (c != '0' && c != '1')
        throw CLI::ValidationError("unanimous inputs must be 0/1 bits");
      v.push_back(c == '1' ? 1 : 0);
    }
    return unanimous_inputs(cfg, v);
  }
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw CLI::ValidationError("cannot open inputs file");
    std::vector<std::vector<Slot>> inputs;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<Slot> v;
      for (char c : line) {
        if (c != '0' && c != '1')
          throw CLI::ValidationError("inputs file must contain 0/1 lines");
        v.push_back(c == '1' ? 1 : 0);
      }
      inputs.push_back(std::move(v));
    }
    return inputs;
  }
  throw CLI::ValidationError("inputs must be unanimous:<bits>, random, or file:<path>");
}

// Rotating strategies model schedules wider than the mobile budget; their
// actions are checked against an (n, 0, width) omission config instead.
std::optional<Config> calibration_config(const std::string& strategy_spec,
                                         const Config& cfg) {
  if (strategy_spec.rfind("rotating:", 0) != 0) return std::nullopt;
  const int width = std::stoi(strategy_spec.substr(9));
  return make_config(ModelKind::OmissionHybrid, cfg.n, 0, width, cfg.k,
                     cfg.phases);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

json check_record(const PropertyResult& r) {
  return json{{"type", "check"}, {"check", r.property}, {"pass", r.pass},
              {"index", r.index}, {"p", r.p},           {"q", r.q},
              {"detail", r.detail}};
}

std::string report_jsonl(const Config& cfg, const std::string& strategy,
                         std::uint64_t seed, const Verdict& verdict) {
  std::ostringstream out;
  out << json{{"type", "header"},
              {"config", config_to_json(cfg)},
              {"strategy", strategy},
              {"seed", seed}}
             .dump()
      << '\n';
  for (const PropertyResult& r : verdict.results)
    out << check_record(r).dump() << '\n';
  out << json{{"type", "summary"}, {"pass", verdict.all_pass()}}.dump() << '\n';
  return out.str();
}

int cmd_run(const ModelFlags& flags, const std::string& strategy_spec,
            std::uint64_t seed, const std::string& inputs_spec,
            const std::string& trace_out, const std::string& report_out,
            const std::string& outputs_out) {
  const Config cfg = build_config(flags);
  auto strategy = make_strategy(strategy_spec, seed);
  const auto inputs = parse_inputs(inputs_spec, cfg, seed);
  const auto calib = calibration_config(strategy_spec, cfg);

  const RunTrace trace =
      run(cfg, *strategy, inputs, seed, calib ? &*calib : nullptr);
  const Verdict verdict = check_vset(trace.inputs, trace.outputs, cfg.k);

  if (!trace_out.empty()) write_file(trace_out, trace_to_jsonl(trace));
  if (!report_out.empty())
    write_file(report_out, report_jsonl(cfg, strategy->name(), seed, verdict));
  if (!outputs_out.empty()) write_file(outputs_out, outputs_to_csv(trace.outputs));

  for (const PropertyResult& r : verdict.results) {
    std::cout << r.property << ": " << (r.pass ? "pass" : "FAIL");
    if (!r.pass)
      std::cout << " (index=" << r.index << " p=" << r.p << " q=" << r.q
                << " " << r.detail << ")";
    std::cout << '\n';
  }
  const bool ok = verdict.all_pass();
  std::cout << "result: " << (ok ? "pass" : "PROTOCOL_VIOLATION") << '\n';
  return ok ? kExitOk : kExitProtocolViolation;
}

std::vector<std::string> default_strategies(ModelKind kind) {
  std::vector<std::string> out = {"null", "random:0.3", "random:0.7",
                                  "random:1.0", "coordinator_killer"};
  if (kind == ModelKind::ByzantineHybrid) out.push_back("equivocator");
  return out;
}

int cmd_battery(const ModelFlags& flags, int runs,
                std::vector<std::string> strategies, std::uint64_t seed_base,
                std::vector<std::string> classes, const std::string& out_path) {
  const Config cfg = build_config(flags);
  if (strategies.empty()) strategies = default_strategies(cfg.kind);
  if (classes.empty()) classes = {"random", "unanimous"};

  std::ostringstream csv;
  csv << "model,strategy,input_class,runs,passes,failures,first_fail_seed\n";
  bool all_pass = true;
  if (runs <= 0) strategies.clear();
  for (const std::string& spec : strategies) {
    for (const std::string& cls : classes) {
      int passes = 0;
      std::optional<std::uint64_t> first_fail;
      for (int i = 0; i < runs; ++i) {
        const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(i);
        auto strategy = make_strategy(spec, seed);
        const auto inputs = seeded_inputs(cfg, seed, cls == "unanimous");
        const auto calib = calibration_config(spec, cfg);
        const RunTrace trace =
            run(cfg, *strategy, inputs, seed, calib ? &*calib : nullptr);
        const Verdict verdict = check_vset(trace.inputs, trace.outputs, cfg.k);
        if (verdict.all_pass()) {
          ++passes;
        } else if (!first_fail) {
          first_fail = seed;
        }
      }
      all_pass = all_pass && passes == runs;
      csv << kind_name(cfg.kind) << ',' << spec << ',' << cls << ',' << runs
          << ',' << passes << ',' << (runs - passes) << ',';
      if (first_fail) csv << *first_fail;
      csv << '\n';
    }
  }
  if (out_path.empty())
    std::cout << csv.str();
  else
    write_file(out_path, csv.str());
  return all_pass ? kExitOk : kExitProtocolViolation;
}

int cmd_boundary(int f, int m, int n_min, int n_max, int chunks, int width,
                 const std::string& out_path) {
  const auto rows = boundary_sweep(f, m, n_min, n_max, chunks, width);
  const std::string csv = boundary_csv(rows);
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  return kExitOk;
}

int cmd_exhaustive(const std::string& model, int n, int f, int m) {
  const Verdict verdict = exhaustive_ca(kind_from_name(model), n, f, m);
  for (const PropertyResult& r : verdict.results)
    std::cout << r.property << ": " << (r.pass ? "pass" : "FAIL") << " ("
              << r.detail << ")\n";
  return verdict.all_pass() ? kExitOk : kExitProtocolViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for synchronous consensus under "
               "fixed+mobile message adversaries"};
  app.require_subcommand(1);

  ModelFlags run_flags;
  std::string run_strategy = "null";
  std::uint64_t run_seed = 0;
  std::string run_inputs = "random";
  std::string trace_out, report_out, outputs_out;
  CLI::App* c_run = app.add_subcommand("run", "single simulation + property check");
  add_model_flags(c_run, run_flags);
  c_run->add_option("--strategy", run_strategy,
                    "null | random:<p> | rotating:<w> | coordinator_killer | equivocator");
  c_run->add_option("--seed", run_seed, "seed for strategy and random inputs");
  c_run->add_option("--inputs", run_inputs, "unanimous:<bits> | random | file:<path>");
  c_run->add_option("--trace-out", trace_out, "write the full trace (JSONL)");
  c_run->add_option("--report-out", report_out, "write the check report (JSONL)");
  c_run->add_option("--outputs-out", outputs_out, "write output vectors (CSV)");

  ModelFlags bat_flags;
  int bat_runs = 100;
  std::vector<std::string> bat_strategies, bat_classes;
  std::uint64_t bat_seed = 1;
  std::string bat_out;
  CLI::App* c_bat = app.add_subcommand("battery", "seeded run sweep, CSV summary");
  add_model_flags(c_bat, bat_flags);
  c_bat->add_option("--runs", bat_runs, "runs per strategy and input class");
  c_bat->add_option("--strategies", bat_strategies, "strategy specs")->delimiter(',');
  c_bat->add_option("--classes", bat_classes, "input classes (random, unanimous)")
      ->delimiter(',');
  c_bat->add_option("--seed", bat_seed, "base seed; run i uses seed+i");
  c_bat->add_option("--out", bat_out, "CSV path (default stdout)");

  int b_f = 1, b_m = 1, b_nmin = 2, b_nmax = 8, b_chunks = 2, b_width = 0;
  std::string b_out;
  CLI::App* c_bnd = app.add_subcommand(
      "boundary", "attribution sweep over n for rotating omission schedules");
  c_bnd->add_option("--f", b_f, "fixed budget")->required();
  c_bnd->add_option("--m", b_m, "mobile budget")->required();
  c_bnd->add_option("--n-min", b_nmin, "first n")->required();
  c_bnd->add_option("--n-max", b_nmax, "last n")->required();
  c_bnd->add_option("--chunks", b_chunks, "schedule chunks (n rounds each)");
  c_bnd->add_option("--width", b_width, "window width (default m+1)");
  c_bnd->add_option("--out", b_out, "CSV path (default stdout)");

  std::string ex_model = "omission";
  int ex_n = 4, ex_f = 1, ex_m = 0;
  CLI::App* c_ex = app.add_subcommand(
      "exhaustive", "brute-force commit-adopt check over all inputs and actions");
  c_ex->add_option("--model", ex_model, "omission | byzantine | constrained")
      ->check(CLI::IsMember({"omission", "byzantine", "constrained"}));
  c_ex->add_option("--n", ex_n, "processor count (<= 5)")->required();
  c_ex->add_option("--f", ex_f, "fixed budget");
  c_ex->add_option("--m", ex_m, "mobile budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed())
      return cmd_run(run_flags, run_strategy, run_seed, run_inputs, trace_out,
                     report_out, outputs_out);
    if (c_bat->parsed())
      return cmd_battery(bat_flags, bat_runs, bat_strategies, bat_seed,
                         bat_classes, bat_out);
    if (c_bnd->parsed())
      return cmd_boundary(b_f, b_m, b_nmin, b_nmax, b_chunks, b_width, b_out);
    if (c_ex->parsed()) return cmd_exhaustive(ex_model, ex_n, ex_f, ex_m);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const AdversaryBug& e) {
    std::cerr << "ADVERSARY_BUG: " << e.what() << '\n';
    return kExitHarnessBug;
  } catch (const EngineBug& e) {
    std::cerr << "ENGINE_BUG: " << e.what() << '\n';
    return kExitHarnessBug;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
