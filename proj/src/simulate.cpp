#include "prefrank/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "prefrank/csvio.hpp"
#include "prefrank/errors.hpp"
#include "prefrank/metrics.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void parallel_for(std::size_t n_tasks, int jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n_tasks)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n_tasks;) fn(i);
    });
  for (std::thread& w : workers) w.join();
}

std::string error_status(const std::exception& e) {
  std::string s = "error: ";
  for (const char* p = e.what(); *p; ++p) {
    const char c = *p;
    s += (c == ',' || c == '\n' || c == '\r') ? ';' : c;
  }
  return s;
}

void check_truth_covered(const Dataset& ds, const SystemTruth& truth) {
  if (truth.size() < 2)
    throw ValidationError("need ground truth for at least 2 systems");
  for (const auto& [sys, value] : truth) {
    ds.system_index(sys); // throws for unknown systems
    (void)value;
  }
}

std::map<std::string, double> restrict_to_truth(const UtilityScores& u,
                                                const SystemTruth& truth) {
  std::map<std::string, double> out;
  for (const auto& [sys, value] : truth) {
    (void)value;
    out[sys] = u.values.at(sys);
  }
  return out;
}

UtilityScores aggregate_tally(const ComparisonTally& t, Aggregator agg, const BtlConfig& btl) {
  switch (agg) {
    case Aggregator::DC: return agg_dc(t);
    case Aggregator::WC: return agg_wc(t);
    case Aggregator::BTL: return agg_btl(t, btl).utilities;
    default:
      throw ValidationError("aggregator " + std::string(aggregator_name(agg)) +
                            " does not consume win/loss tallies");
  }
}

void summarize(SimResult& result, const std::vector<std::int64_t>& k_values, int n_runs) {
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
    SimSummary s;
    s.k = k_values[ki];
    double sum = 0.0;
    for (int r = 0; r < n_runs; ++r) {
      const SimRow& row = result.rows[ki * static_cast<std::size_t>(n_runs) + r];
      if (row.status != "ok") continue;
      sum += row.srcc;
      ++s.n_ok;
    }
    if (s.n_ok == 0) {
      s.mean_srcc = kNan;
      s.sd_srcc = kNan;
    } else {
      s.mean_srcc = sum / s.n_ok;
      double ss = 0.0;
      for (int r = 0; r < n_runs; ++r) {
        const SimRow& row = result.rows[ki * static_cast<std::size_t>(n_runs) + r];
        if (row.status != "ok") continue;
        ss += (row.srcc - s.mean_srcc) * (row.srcc - s.mean_srcc);
      }
      s.sd_srcc = s.n_ok > 1 ? std::sqrt(ss / (s.n_ok - 1)) : 0.0;
    }
    result.summaries.push_back(s);
  }
}

} // namespace

SimResult run_bound_simulation(const Dataset& ds, const SystemTruth& truth,
                               const SimConfig& cfg) {
  if (cfg.k_values.empty()) throw ValidationError("no pair budgets given");
  if (cfg.n_runs < 1) throw ValidationError("n_runs must be >= 1");
  if (cfg.jobs < 1) throw ValidationError("jobs must be >= 1");
  if (cfg.aggregator == Aggregator::PS || cfg.aggregator == Aggregator::Mean)
    throw ValidationError("bound simulation supports DC, WC and BTL only");
  check_truth_covered(ds, truth);
  const int n = static_cast<int>(ds.systems().size());
  for (std::int64_t k : cfg.k_values) check_plan_args(cfg.method, n, k);

  const PairRealizer realizer(ds);
  SimResult result;
  result.method = pair_method_name(cfg.method);
  result.aggregator = aggregator_name(cfg.aggregator);
  result.same_listener = cfg.same_listener;
  result.rows.resize(cfg.k_values.size() * static_cast<std::size_t>(cfg.n_runs));

  parallel_for(result.rows.size(), cfg.jobs, [&](std::size_t slot) {
    const std::size_t ki = slot / static_cast<std::size_t>(cfg.n_runs);
    const int run = static_cast<int>(slot % static_cast<std::size_t>(cfg.n_runs));
    const std::int64_t k = cfg.k_values[ki];
    SimRow& row = result.rows[slot];
    row.k = k;
    row.run = run;
    row.srcc = kNan;
    try {
      Rng rng(derive_seed(cfg.base_seed, static_cast<std::uint64_t>(k),
                          static_cast<std::uint64_t>(run)));
      const PairPlan plan = generate_plan(cfg.method, n, k, rng);
      const RealizedPairs rp = realizer.realize(plan, cfg.same_listener, cfg.strict, rng);
      row.fallbacks = rp.fallback_count;
      ComparisonTally t(ds.systems());
      for (const RatingPair& p : rp.pairs)
        t.add_index(ds.system_of(p.first), ds.system_of(p.second),
                    pref_gt(ds.rating(p.first).score, ds.rating(p.second).score));
      const UtilityScores u = aggregate_tally(t, cfg.aggregator, cfg.btl);
      row.srcc = srcc(restrict_to_truth(u, truth), truth);
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = error_status(e);
    }
  });

  summarize(result, cfg.k_values, cfg.n_runs);
  return result;
}

SimResult run_model_eval(const ScoreFn& scores, const Dataset& ds, const SystemTruth& truth,
                         const EvalConfig& cfg) {
  if (cfg.n_repeats < 1) throw ValidationError("n_repeats must be >= 1");
  if (cfg.jobs < 1) throw ValidationError("jobs must be >= 1");
  if (cfg.aggregator == Aggregator::Mean)
    throw ValidationError("mean aggregation does not use pairs; use eval_mean_baseline");
  if (cfg.aggregator == Aggregator::PS && cfg.use_threshold)
    throw ValidationError("PS aggregation consumes raw preferences, not thresholded outcomes");
  if (cfg.aggregator != Aggregator::PS && !cfg.use_threshold)
    throw ValidationError(std::string(aggregator_name(cfg.aggregator)) +
                          " aggregation needs thresholded outcomes");
  if (cfg.use_threshold && !(cfg.thresholds.t_lose <= cfg.thresholds.t_win))
    throw ValidationError("thresholds must satisfy t_lose <= t_win");
  check_truth_covered(ds, truth);
  const int n = static_cast<int>(ds.systems().size());
  check_plan_args(cfg.method, n, cfg.k);

  const PairRealizer realizer(ds);
  SimResult result;
  result.method = pair_method_name(cfg.method);
  result.aggregator = aggregator_name(cfg.aggregator);
  result.same_listener = cfg.same_listener;
  result.rows.resize(static_cast<std::size_t>(cfg.n_repeats));

  parallel_for(result.rows.size(), cfg.jobs, [&](std::size_t slot) {
    const int run = static_cast<int>(slot);
    SimRow& row = result.rows[slot];
    row.k = cfg.k;
    row.run = run;
    row.srcc = kNan;
    try {
      Rng rng(derive_seed(cfg.base_seed, static_cast<std::uint64_t>(cfg.k),
                          static_cast<std::uint64_t>(run)));
      const PairPlan plan = generate_plan(cfg.method, n, cfg.k, rng);
      const RealizedPairs rp = realizer.realize(plan, cfg.same_listener, cfg.strict, rng);
      row.fallbacks = rp.fallback_count;

      UtilityScores u;
      if (cfg.aggregator == Aggregator::PS) {
        std::vector<PrefRecord> records;
        records.reserve(rp.pairs.size());
        for (const RatingPair& p : rp.pairs) {
          const Rating& a = ds.rating(p.first);
          const Rating& b = ds.rating(p.second);
          records.push_back(PrefRecord{a.system_id, b.system_id, pref_pred(scores(a), scores(b))});
        }
        u = agg_ps(records, ds.systems());
      } else {
        ComparisonTally t(ds.systems());
        for (const RatingPair& p : rp.pairs) {
          const Rating& a = ds.rating(p.first);
          const Rating& b = ds.rating(p.second);
          t.add_index(ds.system_of(p.first), ds.system_of(p.second),
                      classify(pref_pred(scores(a), scores(b)), cfg.thresholds));
        }
        u = aggregate_tally(t, cfg.aggregator, cfg.btl);
      }
      row.srcc = srcc(restrict_to_truth(u, truth), truth);
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = error_status(e);
    }
  });

  summarize(result, {cfg.k}, cfg.n_repeats);
  return result;
}

SimResult eval_mean_baseline(const ScoreFn& scores, const Dataset& ds,
                             const SystemTruth& truth) {
  check_truth_covered(ds, truth);
  SimResult result;
  result.method = "-";
  result.aggregator = aggregator_name(Aggregator::Mean);
  result.same_listener = false;
  SimRow row;
  row.srcc = kNan;
  try {
    std::map<std::string, std::vector<double>> per_system;
    for (std::size_t i = 0; i < ds.size(); ++i)
      per_system[ds.rating(i).system_id].push_back(scores(ds.rating(i)));
    const UtilityScores u = agg_mean(per_system);
    row.srcc = srcc(restrict_to_truth(u, truth), truth);
    row.status = "ok";
  } catch (const std::exception& e) {
    row.status = error_status(e);
  }
  result.rows.push_back(row);
  summarize(result, {0}, 1);
  return result;
}

void save_results_csv(const std::vector<SimResult>& results, std::ostream& out) {
  out << "method,aggregator,same_listener,k,run,srcc,fallbacks,status\n";
  for (const SimResult& res : results)
    for (const SimRow& row : res.rows)
      out << res.method << ',' << res.aggregator << ',' << (res.same_listener ? 1 : 0) << ','
          << row.k << ',' << row.run << ',' << format_double(row.srcc) << ',' << row.fallbacks
          << ',' << row.status << '\n';
}

void save_summary_csv(const std::vector<SimResult>& results, std::ostream& out) {
  out << "method,aggregator,same_listener,k,mean_srcc,sd_srcc,n_ok\n";
  for (const SimResult& res : results)
    for (const SimSummary& s : res.summaries)
      out << res.method << ',' << res.aggregator << ',' << (res.same_listener ? 1 : 0) << ','
          << s.k << ',' << format_double(s.mean_srcc) << ',' << format_double(s.sd_srcc) << ','
          << s.n_ok << '\n';
}

namespace {

struct ChartScale {
  double lo, hi, px0, px1;
  double map(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

std::string chart_label(const SimResult& r) {
  std::string s = r.method;
  s += '+';
  s += r.aggregator;
  s += r.same_listener ? " same-listener" : "";
  return s;
}

} // namespace

void write_svg_chart(const std::vector<SimResult>& results, std::ostream& out) {
  const int width = 720, height = 480;
  const double left = 70, right = 560, top = 40, bottom = 420;

  double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
  double ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const SimResult& res : results)
    for (const SimSummary& s : res.summaries) {
      if (s.n_ok == 0 || s.k <= 0) continue;
      kmin = std::min(kmin, static_cast<double>(s.k));
      kmax = std::max(kmax, static_cast<double>(s.k));
      ymin = std::min(ymin, s.mean_srcc);
      any = true;
    }
  if (!any) {
    kmin = 1.0;
    kmax = 10.0;
  }
  if (kmin == kmax) kmax = kmin * 10.0;
  const ChartScale x{std::log10(kmin), std::log10(kmax), left, right};
  const ChartScale y{ymin, ymax, bottom, top};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-size=\"14\">comparisons</text>\n";
  out << "<text x=\"16\" y=\"" << (top + bottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
      << (top + bottom) / 2 << ")\">mean SRCC</text>\n";

  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
      << bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << bottom << "\" stroke=\"black\"/>\n";

  for (double e = std::floor(x.lo); e <= std::ceil(x.hi) + 1e-9; e += 1.0) {
    if (e < x.lo - 1e-9 || e > x.hi + 1e-9) continue;
    const double px = x.map(e);
    out << "<line x1=\"" << px << "\" y1=\"" << bottom << "\" x2=\"" << px << "\" y2=\""
        << bottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << bottom + 20
        << "\" text-anchor=\"middle\" font-size=\"12\">1e" << static_cast<int>(e)
        << "</text>\n";
  }
  const int y_ticks = 5;
  for (int i = 0; i <= y_ticks; ++i) {
    const double v = ymin + (ymax - ymin) * i / y_ticks;
    const double py = y.map(v);
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << py << "\" x2=\"" << left << "\" y2=\""
        << py << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 9 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(v) << "</text>\n";
  }

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  for (std::size_t ri = 0; ri < results.size(); ++ri) {
    const char* color = kColors[ri % (sizeof(kColors) / sizeof(kColors[0]))];
    std::string points;
    for (const SimSummary& s : results[ri].summaries) {
      if (s.n_ok == 0 || s.k <= 0) continue;
      if (!points.empty()) points += ' ';
      points += format_double(x.map(std::log10(static_cast<double>(s.k))));
      points += ',';
      points += format_double(y.map(s.mean_srcc));
    }
    if (!points.empty())
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
          << points << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(ri);
    out << "<rect x=\"" << right + 12 << "\" y=\"" << ly - 9
        << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << right + 30 << "\" y=\"" << ly
        << "\" font-size=\"12\">" << chart_label(results[ri]) << "</text>\n";
  }
  out << "</svg>\n";
}

} // namespace prefrank
