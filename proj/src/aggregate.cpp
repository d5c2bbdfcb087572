#include "prefrank/aggregate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "prefrank/csvio.hpp"
#include "prefrank/errors.hpp"

namespace prefrank {

const char* aggregator_name(Aggregator a) {
  switch (a) {
    case Aggregator::DC: return "DC";
    case Aggregator::WC: return "WC";
    case Aggregator::BTL: return "BTL";
    case Aggregator::PS: return "PS";
    case Aggregator::Mean: return "Mean";
  }
  return "?";
}

Aggregator aggregator_from_name(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dc") return Aggregator::DC;
  if (lower == "wc") return Aggregator::WC;
  if (lower == "btl") return Aggregator::BTL;
  if (lower == "ps") return Aggregator::PS;
  if (lower == "mean") return Aggregator::Mean;
  throw ValidationError("unknown aggregator '" + name + "'");
}

ComparisonTally::ComparisonTally(std::vector<std::string> systems)
    : systems_(std::move(systems)) {
  if (systems_.size() < 2) throw ValidationError("tally needs at least 2 systems");
  std::sort(systems_.begin(), systems_.end());
  for (std::size_t i = 0; i + 1 < systems_.size(); ++i)
    if (systems_[i] == systems_[i + 1])
      throw ValidationError("duplicate system '" + systems_[i] + "' in tally universe");
  for (std::size_t i = 0; i < systems_.size(); ++i)
    index_.emplace(systems_[i], static_cast<int>(i));
  const std::size_t n = systems_.size();
  win_.assign(n * n, 0);
  draw_.assign(n * n, 0);
  w_.assign(n, 0);
  d_.assign(n, 0);
  l_.assign(n, 0);
}

std::size_t ComparisonTally::at(int i, int j) const {
  return static_cast<std::size_t>(i) * systems_.size() + static_cast<std::size_t>(j);
}

int ComparisonTally::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown system '" + id + "' in tally");
  return it->second;
}

void ComparisonTally::add(const std::string& a, const std::string& b, Outcome result) {
  add_index(index_of(a), index_of(b), result);
}

void ComparisonTally::add_index(int a, int b, Outcome result) {
  if (a < 0 || b < 0 || a >= n_systems() || b >= n_systems())
    throw ValidationError("tally index out of range");
  if (a == b)
    throw ValidationError("system '" + systems_[a] + "' compared with itself");
  switch (result) {
    case Outcome::Win:
      ++win_[at(a, b)];
      ++w_[a];
      ++l_[b];
      break;
    case Outcome::Loss:
      ++win_[at(b, a)];
      ++w_[b];
      ++l_[a];
      break;
    case Outcome::Draw:
      ++draw_[at(a, b)];
      ++draw_[at(b, a)];
      ++d_[a];
      ++d_[b];
      break;
  }
  ++total_;
}

std::int64_t ComparisonTally::comparisons(int i, int j) const {
  return win_[at(i, j)] + win_[at(j, i)] + draw_[at(i, j)];
}

ComparisonTally tally(const std::vector<OutcomeRecord>& outcomes) {
  std::set<std::string> ids;
  for (const OutcomeRecord& r : outcomes) {
    ids.insert(r.system_a);
    ids.insert(r.system_b);
  }
  return tally(outcomes, std::vector<std::string>(ids.begin(), ids.end()));
}

ComparisonTally tally(const std::vector<OutcomeRecord>& outcomes,
                      std::vector<std::string> systems) {
  ComparisonTally t(std::move(systems));
  for (const OutcomeRecord& r : outcomes) t.add(r.system_a, r.system_b, r.result);
  return t;
}

UtilityScores agg_dc(const ComparisonTally& t) {
  UtilityScores out;
  out.method = Aggregator::DC;
  for (int i = 0; i < t.n_systems(); ++i)
    out.values[t.systems()[i]] = static_cast<double>(t.total_wins(i) - t.total_losses(i));
  return out;
}

UtilityScores agg_wc(const ComparisonTally& t) {
  UtilityScores out;
  out.method = Aggregator::WC;
  for (int i = 0; i < t.n_systems(); ++i)
    out.values[t.systems()[i]] = static_cast<double>(t.total_wins(i));
  return out;
}

namespace {

// Connectivity over decisive edges, for the prior-free precondition.
void check_prior_free(const ComparisonTally& t) {
  const int n = t.n_systems();
  for (int i = 0; i < n; ++i)
    if (t.total_wins(i) == 0 && t.total_draws(i) == 0)
      throw ValidationError("BTL without prior: system '" + t.systems()[i] +
                            "' has no wins or draws");
  std::vector<char> seen(n, 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int i = queue.back();
    queue.pop_back();
    for (int j = 0; j < n; ++j) {
      if (seen[j] || i == j) continue;
      if (t.wins(i, j) + t.wins(j, i) > 0) {
        seen[j] = 1;
        queue.push_back(j);
      }
    }
  }
  for (int j = 0; j < n; ++j)
    if (!seen[j])
      throw ValidationError("BTL without prior: system '" + t.systems()[j] +
                            "' is not connected to '" + t.systems()[0] +
                            "' by decisive comparisons");
}

} // namespace

BtlResult agg_btl(const ComparisonTally& t, const BtlConfig& cfg) {
  if (cfg.max_iter < 1) throw ValidationError("BTL max_iter must be >= 1");
  if (!(cfg.tol > 0.0)) throw ValidationError("BTL tol must be > 0");
  if (cfg.prior < 0.0) throw ValidationError("BTL prior must be >= 0");
  if (cfg.prior == 0.0) check_prior_free(t);

  const int n = t.n_systems();
  // effective wins w_ij = wins + half the draws + prior, precomputed as the
  // per-system numerator and the symmetric pair totals
  std::vector<double> numer(n, 0.0);
  std::vector<double> pair_total(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    numer[i] = static_cast<double>(t.total_wins(i)) + 0.5 * static_cast<double>(t.total_draws(i)) +
               cfg.prior * (n - 1);
    for (int j = i + 1; j < n; ++j) {
      const double s = static_cast<double>(t.wins(i, j) + t.wins(j, i) + t.draws(i, j)) +
                       2.0 * cfg.prior;
      pair_total[static_cast<std::size_t>(i) * n + j] = s;
      pair_total[static_cast<std::size_t>(j) * n + i] = s;
    }
  }

  std::vector<double> q(n, 1.0 / n), next(n), denom(n);
  BtlResult result;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    std::fill(denom.begin(), denom.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double s = pair_total[static_cast<std::size_t>(i) * n + j];
        if (s == 0.0) continue;
        const double share = s / (q[i] + q[j]);
        denom[i] += share;
        denom[j] += share;
      }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      next[i] = numer[i] / denom[i];
      sum += next[i];
    }
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      next[i] = std::max(next[i] / sum, std::numeric_limits<double>::denorm_min());
      delta = std::max(delta, std::abs(next[i] - q[i]));
    }
    q.swap(next);
    result.iterations = iter;
    if (delta < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  result.utilities.method = Aggregator::BTL;
  for (int i = 0; i < n; ++i) result.utilities.values[t.systems()[i]] = std::log(q[i]);
  result.q = std::move(q);
  return result;
}

UtilityScores agg_ps(const std::vector<PrefRecord>& raw) {
  std::set<std::string> ids;
  for (const PrefRecord& r : raw) {
    ids.insert(r.system_a);
    ids.insert(r.system_b);
  }
  return agg_ps(raw, std::vector<std::string>(ids.begin(), ids.end()));
}

UtilityScores agg_ps(const std::vector<PrefRecord>& raw, std::vector<std::string> systems) {
  UtilityScores out;
  out.method = Aggregator::PS;
  for (std::string& id : systems) out.values.emplace(std::move(id), 0.0);
  for (const PrefRecord& r : raw) {
    if (!std::isfinite(r.pref) || r.pref < -1.0 || r.pref > 1.0)
      throw ValidationError("preference value " + format_double(r.pref) +
                            " outside [-1, 1] for pair ('" + r.system_a + "', '" +
                            r.system_b + "')");
    auto a = out.values.find(r.system_a);
    auto b = out.values.find(r.system_b);
    if (a == out.values.end())
      throw ValidationError("unknown system '" + r.system_a + "' in preference records");
    if (b == out.values.end())
      throw ValidationError("unknown system '" + r.system_b + "' in preference records");
    a->second += r.pref;
    b->second -= r.pref;
  }
  return out;
}

UtilityScores agg_mean(const std::map<std::string, std::vector<double>>& scores) {
  UtilityScores out;
  out.method = Aggregator::Mean;
  for (const auto& [id, values] : scores) {
    if (values.empty())
      throw ValidationError("system '" + id + "' has no scores to average");
    double sum = 0.0;
    for (double v : values) sum += v;
    out.values[id] = sum / static_cast<double>(values.size());
  }
  return out;
}

void save_utilities_csv(const UtilityScores& scores, std::ostream& out) {
  out << "system_id,utility,method\n";
  for (const auto& [id, value] : scores.values)
    out << id << ',' << format_double(value) << ',' << aggregator_name(scores.method) << '\n';
}

} // namespace prefrank
