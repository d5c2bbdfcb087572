// prefrank command-line tool: synthesize datasets, plan and realize
// comparison pairs, run simulation sweeps, train and evaluate score models.
// Every command writes a manifest.json describing the resolved run.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "prefrank/aggregate.hpp"
#include "prefrank/csvio.hpp"
#include "prefrank/dataset.hpp"
#include "prefrank/errors.hpp"
#include "prefrank/metrics.hpp"
#include "prefrank/pairgen.hpp"
#include "prefrank/preference.hpp"
#include "prefrank/simulate.hpp"
#include "prefrank/trainer.hpp"

namespace {

using nlohmann::ordered_json;
using namespace prefrank;

constexpr const char* kVersion = "0.1.0";

// 0 success, 1 usage/validation, 2 completed with run errors, 3 I/O
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRunErrors = 2;
constexpr int kExitIo = 3;

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_outdir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

class ManifestWriter {
public:
  ManifestWriter(const std::string& command, const std::string& outdir)
      : outdir_(outdir), start_(std::chrono::steady_clock::now()) {
    doc_["tool"] = "prefrank";
    doc_["version"] = kVersion;
    doc_["command"] = command;
  }

  ordered_json& doc() { return doc_; }

  void add_output(const std::string& key, const std::string& path) {
    doc_["outputs"][key] = path;
  }

  void write() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    doc_["duration_seconds"] =
        std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
    const std::string path = join_path(outdir_, "manifest.json");
    auto out = open_output(path);
    out << doc_.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
  }

private:
  std::string outdir_;
  ordered_json doc_;
  std::chrono::steady_clock::time_point start_;
};

QualityDist parse_quality(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(':', start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  if (parts.size() != 3)
    throw ValidationError("quality must be uniform:LO:HI or normal:MEAN:SD, got '" + text + "'");
  QualityDist q;
  if (parts[0] == "uniform")
    q.kind = QualityDist::Kind::Uniform;
  else if (parts[0] == "normal")
    q.kind = QualityDist::Kind::Normal;
  else
    throw ValidationError("quality kind must be uniform or normal, got '" + parts[0] + "'");
  q.a = parse_double(parts[1], "quality");
  q.b = parse_double(parts[2], "quality");
  if (q.kind == QualityDist::Kind::Uniform && !(q.a < q.b))
    throw ValidationError("uniform quality needs LO < HI");
  if (q.kind == QualityDist::Kind::Normal && q.b < 0.0)
    throw ValidationError("normal quality needs SD >= 0");
  return q;
}

Dataset load_dataset(const std::string& path, bool normalized) {
  Dataset ds = load_csv(path);
  if (!normalized) return ds;
  std::vector<Rating> ratings = ds.ratings();
  return Dataset(std::move(ratings), Scale::Norm11);
}

SystemTruth resolve_truth(const std::string& truth_path, const Dataset& ds) {
  return truth_path.empty() ? system_truth(ds) : load_truth_csv(truth_path);
}

// All ordered same-listener rating pairs of the dev set, for threshold fits.
void dev_preferences(const Dataset& dev, const ScoreFn& scores, std::vector<double>& preds,
                     std::vector<Outcome>& truths) {
  for (std::size_t l = 0; l < dev.listeners().size(); ++l) {
    const auto& idx = dev.ratings_of_listener(static_cast<int>(l));
    for (std::uint32_t i : idx)
      for (std::uint32_t j : idx) {
        if (i == j) continue;
        const Rating& a = dev.rating(i);
        const Rating& b = dev.rating(j);
        preds.push_back(pref_pred(scores(a), scores(b)));
        truths.push_back(pref_gt(a.score, b.score));
      }
  }
  if (preds.empty()) throw ValidationError("dev split has no same-listener pairs");
}

int report_run_errors(const std::vector<SimResult>& results) {
  std::int64_t failed = 0, total = 0;
  for (const SimResult& res : results)
    for (const SimRow& row : res.rows) {
      ++total;
      if (row.status != "ok") ++failed;
    }
  if (failed > 0) {
    std::cerr << failed << " of " << total << " runs recorded errors\n";
    return kExitRunErrors;
  }
  return kExitOk;
}

struct SynthArgs {
  SynthConfig cfg;
  std::string quality = "uniform:1:5";
  bool no_quantize = false;
  std::string outdir = ".";
};

int cmd_synth(const SynthArgs& args) {
  SynthConfig cfg = args.cfg;
  cfg.system_quality = parse_quality(args.quality);
  cfg.quantize = !args.no_quantize;

  ensure_outdir(args.outdir);
  ManifestWriter manifest("synth", args.outdir);
  SyntheticData data = generate_synthetic(cfg);

  const std::string dataset_path = join_path(args.outdir, "dataset.csv");
  const std::string truth_path = join_path(args.outdir, "truth.csv");
  save_csv(data.dataset, dataset_path);
  save_truth_csv(data.latent, truth_path);

  manifest.doc()["config"] = {
      {"systems", cfg.n_systems},
      {"utterances_per_system", cfg.utterances_per_system},
      {"ratings_per_utterance", cfg.ratings_per_utterance},
      {"listeners", cfg.n_listeners},
      {"quality", args.quality},
      {"listener_bias_sd", cfg.listener_bias_sd},
      {"noise_sd", cfg.noise_sd},
      {"quantize", cfg.quantize},
      {"fresh_listeners", cfg.fresh_listeners},
      {"seed", cfg.seed},
  };
  manifest.add_output("dataset", dataset_path);
  manifest.add_output("truth", truth_path);
  manifest.write();
  std::cout << "wrote " << dataset_path << " (" << data.dataset.size() << " ratings), "
            << truth_path << '\n';
  return kExitOk;
}

struct SplitArgs {
  std::string data;
  double dev_fraction = 0.1;
  std::uint64_t seed = 0;
  std::string outdir = ".";
};

int cmd_split(const SplitArgs& args) {
  ensure_outdir(args.outdir);
  ManifestWriter manifest("split", args.outdir);
  const Dataset ds = load_csv(args.data);
  Rng rng(args.seed);
  auto [train_ds, dev_ds] = split_ratings(ds, args.dev_fraction, rng);

  const std::string train_path = join_path(args.outdir, "train.csv");
  const std::string dev_path = join_path(args.outdir, "dev.csv");
  save_csv(train_ds, train_path);
  save_csv(dev_ds, dev_path);

  manifest.doc()["config"] = {{"data", args.data},
                              {"dev_fraction", args.dev_fraction},
                              {"seed", args.seed}};
  manifest.add_output("train", train_path);
  manifest.add_output("dev", dev_path);
  manifest.write();
  std::cout << "wrote " << train_path << " (" << train_ds.size() << " ratings), " << dev_path
            << " (" << dev_ds.size() << " ratings)\n";
  return kExitOk;
}

struct PlanArgs {
  std::string data;
  std::string method = "rand";
  std::int64_t k = 0;
  std::uint64_t seed = 0;
  std::string outdir = ".";
};

int cmd_plan(const PlanArgs& args) {
  ensure_outdir(args.outdir);
  ManifestWriter manifest("plan", args.outdir);
  const Dataset ds = load_csv(args.data);
  const PairMethod method = pair_method_from_name(args.method);
  Rng rng(args.seed);
  const PairPlan plan = generate_plan(method, static_cast<int>(ds.systems().size()), args.k, rng);

  const std::string plan_path = join_path(args.outdir, "plan.csv");
  auto out = open_output(plan_path);
  save_plan_csv(plan, ds.systems(), out);
  if (!out) throw IoError("write failed: " + plan_path);

  manifest.doc()["config"] = {{"data", args.data},
                              {"method", pair_method_name(method)},
                              {"k", args.k},
                              {"seed", args.seed}};
  manifest.add_output("plan", plan_path);
  manifest.write();
  std::cout << "wrote " << plan_path << " (" << plan.total() << " pairs over "
            << plan.n_systems() << " systems)\n";
  return kExitOk;
}

struct RealizeArgs {
  std::string data;
  std::string plan;
  bool same_listener = false;
  bool strict = false;
  std::uint64_t seed = 0;
  std::string outdir = ".";
};

int cmd_realize(const RealizeArgs& args) {
  ensure_outdir(args.outdir);
  ManifestWriter manifest("realize", args.outdir);
  const Dataset ds = load_csv(args.data);
  const PairPlan plan = bind_plan(load_plan_csv(args.plan), ds);
  Rng rng(args.seed);
  const RealizedPairs rp = realize_plan(plan, ds, args.same_listener, args.strict, rng);

  const std::string pairs_path = join_path(args.outdir, "pairs.csv");
  auto out = open_output(pairs_path);
  save_pairs_csv(rp.pairs, ds, out);
  if (!out) throw IoError("write failed: " + pairs_path);

  manifest.doc()["config"] = {{"data", args.data},
                              {"plan", args.plan},
                              {"same_listener", args.same_listener},
                              {"strict", args.strict},
                              {"seed", args.seed}};
  manifest.doc()["fallbacks"] = rp.fallback_count;
  manifest.add_output("pairs", pairs_path);
  manifest.write();
  std::cout << "wrote " << pairs_path << " (" << rp.pairs.size() << " pairs, "
            << rp.fallback_count << " fallbacks)\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string data;
  std::string truth;
  std::string method = "rand";
  std::string agg = "dc";
  std::vector<std::int64_t> k_values;
  int runs = 100;
  bool same_listener = false;
  bool strict = false;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool svg = false;
  BtlConfig btl;
  std::string outdir = ".";
};

int cmd_simulate(const SimulateArgs& args) {
  ensure_outdir(args.outdir);
  ManifestWriter manifest("simulate", args.outdir);
  const Dataset ds = load_csv(args.data);
  const SystemTruth truth = resolve_truth(args.truth, ds);

  SimConfig cfg;
  cfg.method = pair_method_from_name(args.method);
  cfg.aggregator = aggregator_from_name(args.agg);
  cfg.k_values = args.k_values;
  cfg.n_runs = args.runs;
  cfg.same_listener = args.same_listener;
  cfg.strict = args.strict;
  cfg.base_seed = args.seed;
  cfg.jobs = args.jobs;
  cfg.btl = args.btl;

  const SimResult result = run_bound_simulation(ds, truth, cfg);
  const std::vector<SimResult> results{result};

  const std::string results_path = join_path(args.outdir, "results.csv");
  const std::string summary_path = join_path(args.outdir, "summary.csv");
  {
    auto out = open_output(results_path);
    save_results_csv(results, out);
    if (!out) throw IoError("write failed: " + results_path);
  }
  {
    auto out = open_output(summary_path);
    save_summary_csv(results, out);
    if (!out) throw IoError("write failed: " + summary_path);
  }
  manifest.add_output("results", results_path);
  manifest.add_output("summary", summary_path);
  if (args.svg) {
    const std::string svg_path = join_path(args.outdir, "chart.svg");
    auto out = open_output(svg_path);
    write_svg_chart(results, out);
    if (!out) throw IoError("write failed: " + svg_path);
    manifest.add_output("chart", svg_path);
  }

  manifest.doc()["config"] = {
      {"data", args.data},
      {"truth", args.truth},
      {"method", result.method},
      {"aggregator", result.aggregator},
      {"k", args.k_values},
      {"runs", args.runs},
      {"same_listener", args.same_listener},
      {"strict", args.strict},
      {"seed", args.seed},
      {"jobs", args.jobs},
      {"btl", {{"max_iter", args.btl.max_iter}, {"tol", args.btl.tol}, {"prior", args.btl.prior}}},
  };
  manifest.write();

  for (const SimSummary& s : result.summaries)
    std::cout << result.method << '+' << result.aggregator << " k=" << s.k
              << " mean_srcc=" << format_double(s.mean_srcc) << " n_ok=" << s.n_ok << '\n';
  return report_run_errors(results);
}

struct TrainArgs {
  std::string data;
  bool normalized = false;
  std::string objective = "preference";
  TrainConfig cfg;
  std::string outdir = ".";
};

int cmd_train(const TrainArgs& args) {
  ensure_outdir(args.outdir);
  ManifestWriter manifest("train", args.outdir);

  TrainConfig cfg = args.cfg;
  if (args.objective == "preference")
    cfg.objective = Objective::Preference;
  else if (args.objective == "direct")
    cfg.objective = Objective::Direct;
  else
    throw ValidationError("objective must be preference or direct, got '" + args.objective + "'");

  Dataset ds = load_dataset(args.data, args.normalized);
  if (ds.scale() == Scale::Mos15) ds = normalize(ds);
  const ScoreModel model = train(ds, cfg);

  const std::string theta_path = join_path(args.outdir, "theta.csv");
  const std::string bias_path = join_path(args.outdir, "bias.csv");
  save_model_csv(model, theta_path, bias_path);

  manifest.doc()["config"] = {
      {"data", args.data},
      {"normalized_input", args.normalized},
      {"objective", args.objective},
      {"learning_rate", cfg.learning_rate},
      {"epochs", cfg.epochs},
      {"pairs_per_epoch", cfg.pairs_per_epoch},
      {"batch_size", cfg.batch_size},
      {"seed", cfg.seed},
  };
  manifest.add_output("theta", theta_path);
  manifest.add_output("bias", bias_path);
  manifest.write();
  std::cout << "wrote " << theta_path << " (" << model.utterances().size() << " utterances), "
            << bias_path << " (" << model.listeners().size() << " listeners)\n";
  return kExitOk;
}

struct EvalArgs {
  std::string data;
  std::string truth;
  std::string theta;
  std::string bias;
  std::string dev;
  std::string method = "bs";
  std::string agg = "dc";
  std::string threshold;
  std::int64_t k = 0;
  int repeats = 1;
  bool same_listener = false;
  bool strict = false;
  std::uint64_t seed = 0;
  int jobs = 1;
  BtlConfig btl;
  std::string outdir = ".";
  bool method_given = false, k_given = false, threshold_given = false;
};

int cmd_eval(const EvalArgs& args) {
  ensure_outdir(args.outdir);
  ManifestWriter manifest("eval", args.outdir);

  const Aggregator agg = aggregator_from_name(args.agg);
  if (agg == Aggregator::PS && args.threshold_given)
    throw ValidationError("PS aggregation is threshold-free; drop --threshold");
  if (agg == Aggregator::Mean && (args.method_given || args.k_given || args.threshold_given))
    throw ValidationError("mean aggregation uses no pairs; drop --method/--k/--threshold");
  if (agg != Aggregator::Mean && agg != Aggregator::PS && !args.threshold_given)
    throw ValidationError(std::string(aggregator_name(agg)) + " aggregation needs --threshold");
  if (agg != Aggregator::Mean && !args.k_given)
    throw ValidationError("--k is required for pair-based aggregation");

  const Dataset ds = load_csv(args.data);
  const SystemTruth truth = resolve_truth(args.truth, ds);
  const ScoreModel model = load_model_csv(args.theta, args.bias);
  const ScoreFn scores = [&model](const Rating& r) {
    return model.predict(r.utterance_id, r.listener_id);
  };

  std::vector<SimResult> results;
  ordered_json threshold_info;
  if (agg == Aggregator::Mean) {
    results.push_back(eval_mean_baseline(scores, ds, truth));
  } else {
    EvalConfig cfg;
    cfg.method = pair_method_from_name(args.method);
    cfg.k = args.k;
    cfg.aggregator = agg;
    cfg.n_repeats = args.repeats;
    cfg.same_listener = args.same_listener;
    cfg.strict = args.strict;
    cfg.base_seed = args.seed;
    cfg.jobs = args.jobs;
    cfg.btl = args.btl;
    cfg.use_threshold = agg != Aggregator::PS;

    if (cfg.use_threshold) {
      if (args.threshold == "er") {
        cfg.thresholds = thresholds_er();
      } else if (args.threshold == "nd") {
        cfg.thresholds = thresholds_nd();
      } else if (args.threshold == "eer") {
        if (args.dev.empty())
          throw ValidationError("--threshold eer needs a --dev split to fit on");
        const Dataset dev = load_csv(args.dev);
        std::vector<double> preds;
        std::vector<Outcome> truths;
        dev_preferences(dev, scores, preds, truths);
        cfg.thresholds = fit_eer_thresholds(preds, truths);
        const std::string thresholds_path = join_path(args.outdir, "thresholds.json");
        auto out = open_output(thresholds_path);
        out << thresholds_to_json(cfg.thresholds) << '\n';
        if (!out) throw IoError("write failed: " + thresholds_path);
        manifest.add_output("thresholds", thresholds_path);
      } else {
        throw ValidationError("threshold must be er, eer or nd, got '" + args.threshold + "'");
      }
      threshold_info = {{"name", args.threshold},
                        {"t_lose", cfg.thresholds.t_lose},
                        {"t_win", cfg.thresholds.t_win}};
    }
    results.push_back(run_model_eval(scores, ds, truth, cfg));
  }

  const std::string results_path = join_path(args.outdir, "results.csv");
  const std::string summary_path = join_path(args.outdir, "summary.csv");
  {
    auto out = open_output(results_path);
    save_results_csv(results, out);
    if (!out) throw IoError("write failed: " + results_path);
  }
  {
    auto out = open_output(summary_path);
    save_summary_csv(results, out);
    if (!out) throw IoError("write failed: " + summary_path);
  }
  manifest.add_output("results", results_path);
  manifest.add_output("summary", summary_path);

  manifest.doc()["config"] = {
      {"data", args.data},
      {"truth", args.truth},
      {"theta", args.theta},
      {"bias", args.bias},
      {"dev", args.dev},
      {"aggregator", aggregator_name(agg)},
      {"method", agg == Aggregator::Mean ? "-" : pair_method_name(pair_method_from_name(args.method))},
      {"threshold", threshold_info},
      {"k", args.k},
      {"repeats", args.repeats},
      {"same_listener", args.same_listener},
      {"strict", args.strict},
      {"seed", args.seed},
      {"jobs", args.jobs},
  };
  manifest.write();

  for (const SimResult& res : results)
    for (const SimSummary& s : res.summaries)
      std::cout << res.method << '+' << res.aggregator << " k=" << s.k
                << " mean_srcc=" << format_double(s.mean_srcc) << " n_ok=" << s.n_ok << '\n';
  return report_run_errors(results);
}

// srcc keyed by (k, run) from a results CSV, ok rows only
std::map<std::pair<std::int64_t, std::int64_t>, double> load_srcc_rows(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "method,aggregator,same_listener,k,run,srcc,fallbacks,status")
    throw ParseError(path + ": line 1: not a results CSV");
  std::map<std::pair<std::int64_t, std::int64_t>, double> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    const std::string context = path + ": line " + std::to_string(line_no);
    if (f.size() != 8) throw ParseError(context + ": expected 8 columns");
    if (f[7] != "ok") continue;
    const std::int64_t k = parse_int(f[3], context);
    const std::int64_t run = parse_int(f[4], context);
    if (!rows.emplace(std::make_pair(k, run), parse_double(f[5], context)).second)
      throw ParseError(context + ": duplicate (k, run) row");
  }
  return rows;
}

int cmd_ttest(const std::string& path_a, const std::string& path_b) {
  const auto rows_a = load_srcc_rows(path_a);
  const auto rows_b = load_srcc_rows(path_b);
  std::vector<double> a, b;
  for (const auto& [key, srcc_a] : rows_a) {
    auto it = rows_b.find(key);
    if (it == rows_b.end()) continue;
    a.push_back(srcc_a);
    b.push_back(it->second);
  }
  if (a.empty()) throw ValidationError("no (k, run) rows shared by both result files");
  const TTestResult r = paired_t_test(a, b);
  std::cout << "n=" << a.size() << " t=" << format_double(r.t) << " df=" << r.df
            << " p=" << format_double(r.p) << '\n';
  return kExitOk;
}

void add_btl_flags(CLI::App* cmd, BtlConfig& btl) {
  cmd->add_option("--btl-max-iter", btl.max_iter, "BTL iteration cap");
  cmd->add_option("--btl-tol", btl.tol, "BTL convergence tolerance");
  cmd->add_option("--btl-prior", btl.prior, "BTL pseudo-count prior");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"preference-based ranking toolkit for subjective quality scores"};
  app.set_version_flag("--version", std::string("prefrank ") + kVersion);
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic rating dataset");
  synth_cmd->add_option("--systems", synth.cfg.n_systems, "number of systems");
  synth_cmd->add_option("--utterances", synth.cfg.utterances_per_system, "utterances per system");
  synth_cmd->add_option("--ratings", synth.cfg.ratings_per_utterance, "ratings per utterance");
  synth_cmd->add_option("--listeners", synth.cfg.n_listeners, "listener pool size");
  synth_cmd->add_option("--quality", synth.quality, "system quality distribution (uniform:LO:HI or normal:MEAN:SD)");
  synth_cmd->add_option("--bias-sd", synth.cfg.listener_bias_sd, "listener bias standard deviation");
  synth_cmd->add_option("--noise-sd", synth.cfg.noise_sd, "rating noise standard deviation");
  synth_cmd->add_flag("--no-quantize", synth.no_quantize, "keep continuous scores");
  synth_cmd->add_flag("--fresh-listeners", synth.cfg.fresh_listeners, "disjoint listener id namespace");
  synth_cmd->add_option("--seed", synth.cfg.seed, "generator seed");
  synth_cmd->add_option("-o,--outdir", synth.outdir, "output directory");

  SplitArgs split;
  CLI::App* split_cmd = app.add_subcommand("split", "split ratings into train and dev sets");
  split_cmd->add_option("--data", split.data, "dataset CSV")->required();
  split_cmd->add_option("--dev-fraction", split.dev_fraction, "share of each utterance's ratings for dev");
  split_cmd->add_option("--seed", split.seed, "shuffle seed");
  split_cmd->add_option("-o,--outdir", split.outdir, "output directory");

  PlanArgs plan;
  CLI::App* plan_cmd = app.add_subcommand("plan", "generate a comparison-pair plan");
  plan_cmd->add_option("--data", plan.data, "dataset CSV (defines the system set)")->required();
  plan_cmd->add_option("--method", plan.method, "rand, link or bs");
  plan_cmd->add_option("--k", plan.k, "total number of pairs")->required();
  plan_cmd->add_option("--seed", plan.seed, "generator seed");
  plan_cmd->add_option("-o,--outdir", plan.outdir, "output directory");

  RealizeArgs realize;
  CLI::App* realize_cmd = app.add_subcommand("realize", "sample concrete rating pairs for a plan");
  realize_cmd->add_option("--data", realize.data, "dataset CSV")->required();
  realize_cmd->add_option("--plan", realize.plan, "plan CSV")->required();
  realize_cmd->add_flag("--same-listener", realize.same_listener, "both ratings from one listener");
  realize_cmd->add_flag("--strict", realize.strict, "fail when no common listener exists");
  realize_cmd->add_option("--seed", realize.seed, "sampling seed");
  realize_cmd->add_option("-o,--outdir", realize.outdir, "output directory");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo ranking performance sweep");
  sim_cmd->add_option("--data", sim.data, "dataset CSV")->required();
  sim_cmd->add_option("--truth", sim.truth, "truth CSV (default: per-system mean of data)");
  sim_cmd->add_option("--method", sim.method, "rand, link or bs");
  sim_cmd->add_option("--agg", sim.agg, "dc, wc or btl");
  sim_cmd->add_option("--k", sim.k_values, "pair budgets")->required()->delimiter(',');
  sim_cmd->add_option("--runs", sim.runs, "runs per budget");
  sim_cmd->add_flag("--same-listener", sim.same_listener, "both ratings from one listener");
  sim_cmd->add_flag("--strict", sim.strict, "fail a run when no common listener exists");
  sim_cmd->add_option("--seed", sim.seed, "base seed");
  sim_cmd->add_option("--jobs", sim.jobs, "parallel workers");
  sim_cmd->add_flag("--svg", sim.svg, "also write chart.svg");
  add_btl_flags(sim_cmd, sim.btl);
  sim_cmd->add_option("-o,--outdir", sim.outdir, "output directory");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "fit a score table to a dataset");
  train_cmd->add_option("--data", train_args.data, "dataset CSV")->required();
  train_cmd->add_flag("--normalized", train_args.normalized, "input scores already lie in [-1, 1]");
  train_cmd->add_option("--objective", train_args.objective, "preference or direct");
  train_cmd->add_option("--lr", train_args.cfg.learning_rate, "learning rate");
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "training epochs");
  train_cmd->add_option("--pairs-per-epoch", train_args.cfg.pairs_per_epoch,
                        "samples per epoch (0: one per rating)");
  train_cmd->add_option("--batch-size", train_args.cfg.batch_size, "samples per gradient step");
  train_cmd->add_option("--seed", train_args.cfg.seed, "sampling seed");
  train_cmd->add_option("-o,--outdir", train_args.outdir, "output directory");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "rank systems with a trained model");
  eval_cmd->add_option("--data", eval.data, "dataset CSV")->required();
  eval_cmd->add_option("--truth", eval.truth, "truth CSV (default: per-system mean of data)");
  eval_cmd->add_option("--theta", eval.theta, "model utterance table CSV")->required();
  eval_cmd->add_option("--bias", eval.bias, "model listener table CSV")->required();
  eval_cmd->add_option("--dev", eval.dev, "dev dataset CSV for threshold fitting");
  CLI::Option* method_opt = eval_cmd->add_option("--method", eval.method, "rand, link or bs");
  eval_cmd->add_option("--agg", eval.agg, "mean, ps, dc, wc or btl");
  CLI::Option* threshold_opt =
      eval_cmd->add_option("--threshold", eval.threshold, "er, eer or nd");
  CLI::Option* k_opt = eval_cmd->add_option("--k", eval.k, "total number of pairs");
  eval_cmd->add_option("--repeats", eval.repeats, "independent pair regenerations");
  eval_cmd->add_flag("--same-listener", eval.same_listener, "both ratings from one listener");
  eval_cmd->add_flag("--strict", eval.strict, "fail a repeat when no common listener exists");
  eval_cmd->add_option("--seed", eval.seed, "base seed");
  eval_cmd->add_option("--jobs", eval.jobs, "parallel workers");
  add_btl_flags(eval_cmd, eval.btl);
  eval_cmd->add_option("-o,--outdir", eval.outdir, "output directory");

  std::string ttest_a, ttest_b;
  CLI::App* ttest_cmd = app.add_subcommand("ttest", "paired t-test over two results CSVs");
  ttest_cmd->add_option("a", ttest_a, "first results CSV")->required();
  ttest_cmd->add_option("b", ttest_b, "second results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (split_cmd->parsed()) return cmd_split(split);
    if (plan_cmd->parsed()) return cmd_plan(plan);
    if (realize_cmd->parsed()) return cmd_realize(realize);
    if (sim_cmd->parsed()) return cmd_simulate(sim);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (eval_cmd->parsed()) {
      eval.method_given = method_opt->count() > 0;
      eval.k_given = k_opt->count() > 0;
      eval.threshold_given = threshold_opt->count() > 0;
      return cmd_eval(eval);
    }
    if (ttest_cmd->parsed()) return cmd_ttest(ttest_a, ttest_b);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
