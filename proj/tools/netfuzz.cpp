// netfuzz -- gate-level netlist fuzzing toolkit CLI.
//
// Subcommands: parse, graph, simulate, dataset, train, infer, fuzz,
// inject, report. Every artifact embeds the effective config digest and
// the PRNG seed so runs replay bit-for-bit.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "netfuzz/checkpoint.hpp"
#include "netfuzz/dataset.hpp"
#include "netfuzz/error.hpp"
#include "netfuzz/fuzzer.hpp"
#include "netfuzz/netgraph.hpp"
#include "netfuzz/netlist.hpp"
#include "netfuzz/oracle.hpp"
#include "netfuzz/sim.hpp"
#include "netfuzz/train.hpp"
#include "netfuzz/util.hpp"

namespace {

using namespace netfuzz;
using nlohmann::json;

constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Run configuration: JSON file, flags override, unknown keys rejected.

struct RunConfig {
  uint64_t prng_seed = 0;
  std::string netlist;
  std::string output_dir;
  // dataset
  uint32_t n_seeds = 100;
  uint32_t T = 1;
  std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};
  std::string dataset_path;
  // model
  ModelConfig model;
  std::string checkpoint_path;
  // fuzz
  FuzzConfig fuzz;
  std::string golden_path;       // defaults to `netlist`
  std::string model_checkpoint;  // optional GRNN in the loop
};

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& scope) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    if (!ok)
      throw Error(Error::Kind::ConfigInvalid,
                  "unknown config key \"" + scope + key + "\"");
  }
}

void parse_model_section(const json& j, ModelConfig& m) {
  reject_unknown(j,
                 {"gcn_dims", "lstm_hidden", "classes", "dropout",
                  "learning_rate", "rms_decay", "rms_epsilon", "batch_size",
                  "max_epochs", "patience", "min_delta", "attention"},
                 "model.");
  if (j.contains("gcn_dims")) m.gcn_dims = j["gcn_dims"].get<std::vector<uint32_t>>();
  if (j.contains("lstm_hidden")) m.lstm_hidden = j["lstm_hidden"].get<uint32_t>();
  if (j.contains("classes")) m.classes = j["classes"].get<uint32_t>();
  if (j.contains("dropout")) m.dropout = j["dropout"].get<double>();
  if (j.contains("learning_rate")) m.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("rms_decay")) m.rms_decay = j["rms_decay"].get<double>();
  if (j.contains("rms_epsilon")) m.rms_epsilon = j["rms_epsilon"].get<double>();
  if (j.contains("batch_size")) m.batch_size = j["batch_size"].get<uint32_t>();
  if (j.contains("max_epochs")) m.max_epochs = j["max_epochs"].get<uint32_t>();
  if (j.contains("patience")) m.patience = j["patience"].get<uint32_t>();
  if (j.contains("min_delta")) m.min_delta = j["min_delta"].get<double>();
  if (j.contains("attention")) m.attention = j["attention"].get<bool>();
}

void parse_fuzz_section(const json& j, RunConfig& c) {
  reject_unknown(j,
                 {"budget", "T", "epsilon", "guided", "compare_mode", "observe",
                  "sim_mode", "score_metric", "golden", "model_checkpoint",
                  "jobs"},
                 "fuzz.");
  if (j.contains("budget")) c.fuzz.budget = j["budget"].get<uint64_t>();
  if (j.contains("T")) c.fuzz.T = j["T"].get<uint32_t>();
  if (j.contains("epsilon")) c.fuzz.epsilon = j["epsilon"].get<double>();
  if (j.contains("guided")) c.fuzz.guided = j["guided"].get<bool>();
  if (j.contains("compare_mode")) {
    const std::string v = j["compare_mode"].get<std::string>();
    if (v == "strict") c.fuzz.compare_mode = CompareMode::Strict;
    else if (v == "lenient") c.fuzz.compare_mode = CompareMode::Lenient;
    else throw Error(Error::Kind::ConfigInvalid, "compare_mode must be lenient|strict");
  }
  if (j.contains("observe")) {
    const std::string v = j["observe"].get<std::string>();
    if (v == "all") c.fuzz.observe = ObserveSet::AllNets;
    else if (v == "outputs") c.fuzz.observe = ObserveSet::PrimaryOutputs;
    else throw Error(Error::Kind::ConfigInvalid, "observe must be outputs|all");
  }
  if (j.contains("sim_mode")) {
    const std::string v = j["sim_mode"].get<std::string>();
    if (v == "unit") c.fuzz.sim_mode = SimMode::UnitDelay;
    else if (v == "zero") c.fuzz.sim_mode = SimMode::ZeroDelay;
    else throw Error(Error::Kind::ConfigInvalid, "sim_mode must be zero|unit");
  }
  if (j.contains("score_metric")) {
    const std::string v = j["score_metric"].get<std::string>();
    if (v == "degree") c.fuzz.score_metric = CentralityChoice::Degree;
    else if (v == "betweenness") c.fuzz.score_metric = CentralityChoice::Betweenness;
    else if (v == "closeness") c.fuzz.score_metric = CentralityChoice::Closeness;
    else if (v == "eigenvector") c.fuzz.score_metric = CentralityChoice::Eigenvector;
    else throw Error(Error::Kind::ConfigInvalid, "unknown score_metric");
  }
  if (j.contains("golden")) c.golden_path = j["golden"].get<std::string>();
  if (j.contains("model_checkpoint"))
    c.model_checkpoint = j["model_checkpoint"].get<std::string>();
  if (j.contains("jobs")) c.fuzz.jobs = j["jobs"].get<int>();
}

RunConfig load_config(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded())
    throw Error(Error::Kind::ConfigInvalid, "config is not valid JSON: " + path);
  reject_unknown(j,
                 {"schema_version", "prng_seed", "netlist", "output_dir",
                  "dataset", "model", "fuzz"},
                 "");
  if (!j.contains("schema_version") ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw Error(Error::Kind::SchemaVersionMismatch,
                "config schema_version must be " + std::to_string(kSchemaVersion));
  RunConfig c;
  if (j.contains("prng_seed")) c.prng_seed = j["prng_seed"].get<uint64_t>();
  if (j.contains("netlist")) c.netlist = j["netlist"].get<std::string>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    reject_unknown(d, {"n_seeds", "T", "split", "path"}, "dataset.");
    if (d.contains("n_seeds")) c.n_seeds = d["n_seeds"].get<uint32_t>();
    if (d.contains("T")) c.T = d["T"].get<uint32_t>();
    if (d.contains("split")) c.split_ratios = d["split"].get<std::array<double, 3>>();
    if (d.contains("path")) c.dataset_path = d["path"].get<std::string>();
  }
  if (j.contains("model")) parse_model_section(j["model"], c.model);
  if (j.contains("fuzz")) parse_fuzz_section(j["fuzz"], c);
  return c;
}

// Canonical serialization of the effective configuration; its hash is the
// digest stamped into artifacts.
json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["prng_seed"] = c.prng_seed;
  j["netlist"] = c.netlist;
  j["output_dir"] = c.output_dir;
  j["dataset"] = {{"n_seeds", c.n_seeds},
                  {"T", c.T},
                  {"split", c.split_ratios},
                  {"path", c.dataset_path}};
  j["model"] = json::parse(model_config_json(c.model));
  j["fuzz"] = {{"budget", c.fuzz.budget},
               {"T", c.fuzz.T},
               {"epsilon", c.fuzz.epsilon},
               {"guided", c.fuzz.guided},
               {"compare_mode",
                c.fuzz.compare_mode == CompareMode::Strict ? "strict" : "lenient"},
               {"observe",
                c.fuzz.observe == ObserveSet::AllNets ? "all" : "outputs"},
               {"sim_mode",
                c.fuzz.sim_mode == SimMode::UnitDelay ? "unit" : "zero"},
               {"golden", c.golden_path},
               {"model_checkpoint", c.model_checkpoint},
               {"jobs", c.fuzz.jobs}};
  return j;
}

std::string config_digest(const RunConfig& c) {
  return fnv1a64_hex(config_to_json(c).dump());
}

std::string out_path(const RunConfig& c, const std::string& name) {
  std::string dir = c.output_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("NETFUZZ_OUT_DIR")) dir = env;
  }
  if (dir.empty()) return name;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

uint32_t resolve_net(const Netlist& nl, const std::string& name) {
  const Net* net = nl.find(name);
  if (!net)
    throw Error(Error::Kind::TargetNotFound, "no net named \"" + name + "\"");
  return net->id;
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_parse(const std::string& path, const std::string& out) {
  const Netlist nl = parse_bench_file(path);
  const std::string text = stats_json(stats(nl));
  if (out.empty())
    std::cout << text;
  else
    atomic_write_file(out, text);
  return 0;
}

int cmd_graph(const std::string& path, const std::string& edges_out,
              const std::string& report_out, int jobs) {
  const Netlist nl = parse_bench_file(path);
  const NetGraph g = build_graph(nl);
  const std::string edges = edge_list_text(g);
  const std::string report = centrality_json(g, centrality_report(g, jobs));
  if (edges_out.empty())
    std::cout << edges;
  else
    atomic_write_file(edges_out, edges);
  if (report_out.empty())
    std::cout << report;
  else
    atomic_write_file(report_out, report);
  return 0;
}

int cmd_simulate(const std::string& path, const std::string& seed_hex,
                 uint32_t T, const std::string& mode, const std::string& csv,
                 const std::string& json_out, const std::string& toggle_out) {
  const Netlist nl = parse_bench_file(path);
  const Seed seed =
      seed_from_hex(seed_hex, static_cast<uint32_t>(nl.input_ids.size()), T);
  const SimMode m = mode == "unit" ? SimMode::UnitDelay : SimMode::ZeroDelay;
  const Waveform wf = simulate_sequence(nl, seed, m);
  if (!csv.empty())
    atomic_write_file(csv, waveform_csv(nl, wf));
  else
    std::cout << waveform_csv(nl, wf);
  if (!json_out.empty()) atomic_write_file(json_out, waveform_json(nl, wf));
  if (!toggle_out.empty())
    atomic_write_file(toggle_out, toggle_json(nl, toggle_coverage(wf)));
  return 0;
}

int cmd_dataset(const RunConfig& c) {
  if (c.netlist.empty())
    throw Error(Error::Kind::ConfigInvalid, "dataset generation needs a netlist");
  const Netlist nl = parse_bench_file(c.netlist);
  Dataset d = generate_dataset(nl, c.n_seeds, c.T, c.prng_seed, c.split_ratios);
  const std::string path =
      c.dataset_path.empty() ? out_path(c, "dataset.nfd") : c.dataset_path;
  save_dataset(d, path);
  json meta;
  meta["config_digest"] = config_digest(c);
  meta["prng_seed"] = c.prng_seed;
  meta["samples"] = d.samples.size();
  meta["toggle_coverage"] = d.manifest.toggle_coverage_percent;
  meta["path"] = path;
  std::cout << meta.dump(2) << '\n';
  return 0;
}

int cmd_train(const RunConfig& c) {
  if (c.netlist.empty())
    throw Error(Error::Kind::ConfigInvalid, "training needs a netlist");
  const Netlist nl = parse_bench_file(c.netlist);
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);

  Dataset d;
  if (!c.dataset_path.empty() && std::filesystem::exists(c.dataset_path)) {
    d = load_dataset(c.dataset_path);
    if (d.manifest.netlist_hash != fnv1a64_hex(write_bench(nl)))
      throw Error(Error::Kind::ConfigInvalid,
                  "dataset was generated from a different netlist");
  } else {
    d = generate_dataset(nl, c.n_seeds, c.T, c.prng_seed, c.split_ratios);
  }

  const SplitIndices idx = split(static_cast<uint32_t>(d.samples.size()),
                                 c.split_ratios, c.prng_seed);
  std::vector<Sample> train_set, val_set;
  for (uint32_t i : idx.train) train_set.push_back(d.samples[i]);
  for (uint32_t i : idx.val) val_set.push_back(d.samples[i]);

  const TrainResult result =
      train(g, a, train_set, val_set, c.model, c.prng_seed);

  const std::string ckpt =
      c.checkpoint_path.empty() ? out_path(c, "model.nfckpt") : c.checkpoint_path;
  save_model(result.model, ckpt);
  atomic_write_file(out_path(c, "metrics.csv"), metrics_csv(result.log));

  json meta;
  meta["config_digest"] = config_digest(c);
  meta["prng_seed"] = c.prng_seed;
  meta["checkpoint"] = ckpt;
  meta["epochs_run"] = result.log.size();
  meta["best_epoch"] = result.best_epoch;
  meta["best_val_loss"] = result.best_val_loss;
  if (!idx.test.empty()) {
    std::vector<Sample> test_set;
    for (uint32_t i : idx.test) test_set.push_back(d.samples[i]);
    const Metrics mt = evaluate(result.model, g, a, test_set);
    meta["test"] = {{"accuracy", mt.accuracy},
                    {"precision", mt.macro_precision},
                    {"recall", mt.macro_recall},
                    {"f1", mt.macro_f1}};
  }
  std::cout << meta.dump(2) << '\n';
  return 0;
}

int cmd_infer(const std::string& ckpt, const std::string& netlist_path,
              const std::string& seed_hex, uint32_t T, const std::string& csv) {
  const Netlist nl = parse_bench_file(netlist_path);
  const NetGraph g = build_graph(nl);
  const NormalizedAdjacency a = normalized_adjacency(g);
  const GrnnModel m = load_model(ckpt);
  const Seed seed =
      seed_from_hex(seed_hex, static_cast<uint32_t>(nl.input_ids.size()), T);
  const Prediction pred = infer(m, g, a, nl, seed);
  const std::string text = waveform_csv(nl, pred.waveform);
  if (csv.empty())
    std::cout << text;
  else
    atomic_write_file(csv, text);
  return 0;
}

int cmd_fuzz(const RunConfig& c, const std::string& report_out) {
  if (c.netlist.empty())
    throw Error(Error::Kind::ConfigInvalid, "fuzzing needs a netlist");
  const Netlist dut = parse_bench_file(c.netlist);

  GoldenModel golden;
  golden.reference =
      c.golden_path.empty() ? dut : parse_bench_file(c.golden_path);
  golden.observe = c.fuzz.observe;

  std::optional<GrnnModel> model;
  if (!c.model_checkpoint.empty()) model = load_model(c.model_checkpoint);

  FuzzReport report = fuzz_loop(dut, golden, model ? &*model : nullptr, c.fuzz,
                                c.prng_seed);
  // The loop digests its own inputs; artifacts carry the run-config digest.
  report.config_digest = config_digest(c);

  const std::string path =
      report_out.empty() ? out_path(c, "fuzz_report.json") : report_out;
  atomic_write_file(path, fuzz_report_json(report));

  // Corpus seeds, one replayable hex file each.
  const std::string corpus_dir = out_path(c, "corpus");
  std::filesystem::create_directories(corpus_dir);
  for (const CorpusEntry& e : report.corpus) {
    json j;
    j["hex"] = seed_to_hex(e.seed);
    j["width"] = e.seed.width;
    j["T"] = e.seed.T;
    j["id"] = e.seed.id;
    j["config_digest"] = report.config_digest;
    j["prng_seed"] = report.prng_seed;
    atomic_write_file(
        (std::filesystem::path(corpus_dir) /
         ("seed_" + std::to_string(e.seed.id) + ".json")).string(),
        j.dump(2) + "\n");
  }
  std::cout << "report written to " << path << " (" << report.discrepancies.size()
            << " discrepancies, coverage "
            << report.final_coverage_percent << "%)\n";
  return 0;
}

int cmd_inject(const std::string& path, const std::string& kind_name,
               const std::string& net_name, const std::string& replacement,
               const std::string& out) {
  const Netlist nl = parse_bench_file(path);
  FaultSpec fault;
  const auto kind = fault_kind_from_name(kind_name);
  if (!kind)
    throw Error(Error::Kind::ConfigInvalid,
                "unknown fault kind \"" + kind_name + "\"");
  fault.kind = *kind;
  fault.target = resolve_net(nl, net_name);
  if (fault.kind == FaultKind::GateSubstitution) {
    const auto repl = gate_kind_from_name(replacement);
    if (!repl)
      throw Error(Error::Kind::UnknownGate,
                  "unknown replacement gate \"" + replacement + "\"");
    fault.replacement = *repl;
  }
  const Netlist faulted = inject_fault(nl, fault);
  const std::string text = write_bench(faulted);
  if (out.empty())
    std::cout << text;
  else
    atomic_write_file(out, text);
  return 0;
}

int cmd_report(const std::vector<std::string>& reports,
               const std::string& csv_out) {
  std::string digest;
  for (const std::string& path : reports) {
    const FuzzReport r = fuzz_report_from_json(read_file(path));
    if (digest.empty()) digest = r.config_digest;
    if (r.config_digest != digest)
      throw Error(Error::Kind::ConfigInvalid,
                  "config digest mismatch across artifacts: " + path);
    std::cout << "== " << path << " ==\n";
    std::cout << "  config digest  " << r.config_digest << '\n';
    std::cout << "  prng seed      " << r.prng_seed << '\n';
    std::cout << "  seeds executed " << r.executed << '\n';
    std::cout << "  coverage       " << r.final_coverage_percent << "%\n";
    std::cout << "  corpus size    " << r.corpus.size() << '\n';
    std::cout << "  discrepancies  " << r.discrepancies.size() << '\n';
    for (size_t i = 0; i < std::min<size_t>(10, r.discrepancies.size()); ++i) {
      const Discrepancy& d = r.discrepancies[i];
      std::cout << "    seed " << d.seed_id << " cycle " << d.cycle << " net "
                << d.net_name << ": expected " << logic_char(d.expected)
                << ", observed " << logic_char(d.observed) << " ["
                << channel_name(d.channel) << "]\n";
    }
    if (r.discrepancies.size() > 10)
      std::cout << "    ... " << r.discrepancies.size() - 10 << " more\n";

    if (!csv_out.empty()) {
      std::string csv = "seed,coverage_percent\n";
      for (size_t i = 0; i < r.coverage_series.size(); ++i)
        csv += std::to_string(i + 1) + ',' +
               std::to_string(r.coverage_series[i]) + '\n';
      atomic_write_file(csv_out, csv);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gate-level netlist fuzzing toolkit"};
  app.require_subcommand(1);

  std::string config_path, netlist_path, out, seed_hex, mode = "zero";
  std::string edges_out, report_out, json_out, toggle_out, csv_out;
  std::string kind_name, net_name, replacement, ckpt;
  std::vector<std::string> report_files;
  uint32_t T = 1;
  int jobs = 1;
  std::optional<uint64_t> prng_override;
  std::optional<uint64_t> budget_override;

  auto* parse = app.add_subcommand("parse", "parse a bench netlist and print stats");
  parse->add_option("netlist", netlist_path)->required();
  parse->add_option("-o,--out", out);

  auto* graph = app.add_subcommand("graph", "emit edge list and centrality report");
  graph->add_option("netlist", netlist_path)->required();
  graph->add_option("--edges", edges_out);
  graph->add_option("--report", report_out);
  graph->add_option("--jobs", jobs);

  auto* simulate = app.add_subcommand("simulate", "simulate a seed");
  simulate->add_option("netlist", netlist_path)->required();
  simulate->add_option("--seed", seed_hex)->required();
  simulate->add_option("--T", T);
  simulate->add_option("--mode", mode)->check(CLI::IsMember({"zero", "unit"}));
  simulate->add_option("--csv", csv_out);
  simulate->add_option("--json", json_out);
  simulate->add_option("--toggle", toggle_out);

  auto* dataset = app.add_subcommand("dataset", "generate a training dataset");
  dataset->add_option("--config", config_path)->required();
  dataset->add_option("--prng", prng_override);

  auto* train_cmd = app.add_subcommand("train", "train the graph model");
  train_cmd->add_option("--config", config_path)->required();
  train_cmd->add_option("--prng", prng_override);

  auto* infer_cmd = app.add_subcommand("infer", "predict a waveform");
  infer_cmd->add_option("--checkpoint", ckpt)->required();
  infer_cmd->add_option("--netlist", netlist_path)->required();
  infer_cmd->add_option("--seed", seed_hex)->required();
  infer_cmd->add_option("--T", T);
  infer_cmd->add_option("--csv", csv_out);

  auto* fuzz = app.add_subcommand("fuzz", "run the coverage-guided loop");
  fuzz->add_option("--config", config_path)->required();
  fuzz->add_option("--prng", prng_override);
  fuzz->add_option("--budget", budget_override);
  fuzz->add_option("--report", report_out);

  auto* inject = app.add_subcommand("inject", "write a fault-injected netlist");
  inject->add_option("netlist", netlist_path)->required();
  inject->add_option("--kind", kind_name)->required();
  inject->add_option("--net", net_name)->required();
  inject->add_option("--with", replacement);
  inject->add_option("-o,--out", out);

  auto* report = app.add_subcommand("report", "summarize fuzz reports");
  report->add_option("reports", report_files)->required();
  report->add_option("--csv", csv_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse->parsed()) return cmd_parse(netlist_path, out);
    if (graph->parsed()) return cmd_graph(netlist_path, edges_out, report_out, jobs);
    if (simulate->parsed())
      return cmd_simulate(netlist_path, seed_hex, T, mode, csv_out, json_out,
                          toggle_out);
    if (inject->parsed())
      return cmd_inject(netlist_path, kind_name, net_name, replacement, out);
    if (report->parsed()) return cmd_report(report_files, csv_out);
    if (infer_cmd->parsed())
      return cmd_infer(ckpt, netlist_path, seed_hex, T, csv_out);

    RunConfig cfg = load_config(config_path);
    if (prng_override) cfg.prng_seed = *prng_override;
    if (budget_override) cfg.fuzz.budget = *budget_override;
    if (dataset->parsed()) return cmd_dataset(cfg);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (fuzz->parsed()) return cmd_fuzz(cfg, report_out);
  } catch (const Error& e) {
    nlohmann::json err;
    err["error"] = Error::kind_name(e.kind());
    err["message"] = e.what();
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = "Internal";
    err["message"] = e.what();
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
