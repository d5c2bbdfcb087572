#ifndef PREFRANK_SIMULATE_HPP
#define PREFRANK_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "prefrank/aggregate.hpp"
#include "prefrank/dataset.hpp"
#include "prefrank/pairgen.hpp"
#include "prefrank/preference.hpp"

namespace prefrank {

/// Monte-Carlo sweep settings. Each (k, run) cell gets its own generator
/// seeded from (base_seed, k, run), so extending k_values or n_runs never
/// changes existing cells.
struct SimConfig {
  PairMethod method = PairMethod::Rand;
  std::vector<std::int64_t> k_values;
  bool same_listener = false;
  Aggregator aggregator = Aggregator::DC; // DC, WC or BTL
  int n_runs = 100;
  std::uint64_t base_seed = 0;
  bool strict = false;
  BtlConfig btl;
  int jobs = 1;
};

struct SimRow {
  std::int64_t k = 0;
  int run = 0;
  double srcc = 0.0; // NaN when status != "ok"
  std::int64_t fallbacks = 0;
  std::string status; // "ok" or "error: ..."
};

struct SimSummary {
  std::int64_t k = 0;
  double mean_srcc = 0.0; // over ok runs; NaN when none
  double sd_srcc = 0.0;   // sample sd; 0 for a single ok run
  int n_ok = 0;
};

struct SimResult {
  std::string method;
  std::string aggregator;
  bool same_listener = false;
  std::vector<SimRow> rows;           // ordered by (k, run)
  std::vector<SimSummary> summaries;  // one per k, in k_values order
};

/// Performance bound: outcomes are the sign of the ground-truth score
/// difference of the two sampled ratings, no model and no thresholds.
/// Bit-identical results for a given config regardless of cfg.jobs.
SimResult run_bound_simulation(const Dataset& ds, const SystemTruth& truth,
                               const SimConfig& cfg);

/// Per-rating score source for model evaluation, usually a trained model.
/// May throw to reject a rating it cannot score.
using ScoreFn = std::function<double(const Rating&)>;

struct EvalConfig {
  PairMethod method = PairMethod::Bs;
  std::int64_t k = 0;
  bool same_listener = false;
  bool strict = false;
  Aggregator aggregator = Aggregator::DC; // DC, WC, BTL or PS
  bool use_threshold = true;              // false only for PS
  Thresholds thresholds;                  // resolved values (fit EER beforehand)
  int n_repeats = 1;
  std::uint64_t base_seed = 0;
  BtlConfig btl;
  int jobs = 1;
};

/// Same pipeline as the bound simulation, but pair outcomes come from
/// model scores: classified preferences for DC/WC/BTL, raw preferences
/// for PS. Seeds derive from (base_seed, k, repeat), so with scores equal
/// to ground truth and the ND threshold this reproduces the bound rows.
SimResult run_model_eval(const ScoreFn& scores, const Dataset& ds, const SystemTruth& truth,
                         const EvalConfig& cfg);

/// Direct baseline: per-system mean of model scores over all ratings,
/// no pairs involved. One row with k = 0, run = 0.
SimResult eval_mean_baseline(const ScoreFn& scores, const Dataset& ds,
                             const SystemTruth& truth);

/// `method,aggregator,same_listener,k,run,srcc,fallbacks,status` rows.
void save_results_csv(const std::vector<SimResult>& results, std::ostream& out);

/// `method,aggregator,same_listener,k,mean_srcc,sd_srcc,n_ok` rows.
void save_summary_csv(const std::vector<SimResult>& results, std::ostream& out);

/// Self-contained chart of mean SRCC against k (log scale), one polyline
/// per result.
void write_svg_chart(const std::vector<SimResult>& results, std::ostream& out);

} // namespace prefrank

#endif
