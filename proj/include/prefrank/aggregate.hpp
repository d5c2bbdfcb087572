#ifndef PREFRANK_AGGREGATE_HPP
#define PREFRANK_AGGREGATE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefrank/preference.hpp"

namespace prefrank {

enum class Aggregator { DC, WC, BTL, PS, Mean };

const char* aggregator_name(Aggregator a);
Aggregator aggregator_from_name(const std::string& name);

/// Win/draw/loss counts per ordered system pair, over a fixed system set.
class ComparisonTally {
public:
  /// Universe of systems; labels are sorted, duplicates rejected.
  explicit ComparisonTally(std::vector<std::string> systems);

  /// Records one comparison, outcome from a's perspective.
  void add(const std::string& a, const std::string& b, Outcome result);
  void add_index(int a, int b, Outcome result);

  int n_systems() const { return static_cast<int>(systems_.size()); }
  const std::vector<std::string>& systems() const { return systems_; }
  int index_of(const std::string& id) const;

  std::int64_t wins(int i, int j) const { return win_[at(i, j)]; }    // i beat j
  std::int64_t draws(int i, int j) const { return draw_[at(i, j)]; }  // symmetric
  std::int64_t comparisons(int i, int j) const;

  std::int64_t total_wins(int i) const { return w_[i]; }
  std::int64_t total_draws(int i) const { return d_[i]; }
  std::int64_t total_losses(int i) const { return l_[i]; }
  std::int64_t total() const { return total_; }

private:
  std::size_t at(int i, int j) const;
  std::vector<std::string> systems_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::int64_t> win_, draw_; // dense n x n
  std::vector<std::int64_t> w_, d_, l_;
  std::int64_t total_ = 0;
};

struct OutcomeRecord {
  std::string system_a, system_b;
  Outcome result; // from system_a's perspective
};

/// System set is taken from the records themselves.
ComparisonTally tally(const std::vector<OutcomeRecord>& outcomes);
/// Declared system set; systems without records keep zero counts.
ComparisonTally tally(const std::vector<OutcomeRecord>& outcomes,
                      std::vector<std::string> systems);

struct UtilityScores {
  std::map<std::string, double> values;
  Aggregator method = Aggregator::Mean;
};

/// Wins minus losses; draws contribute nothing.
UtilityScores agg_dc(const ComparisonTally& t);

/// Wins alone.
UtilityScores agg_wc(const ComparisonTally& t);

struct BtlConfig {
  int max_iter = 200;
  double tol = 1e-4;
  double prior = 0.01; // pseudo-count added to every ordered pair
};

struct BtlResult {
  UtilityScores utilities;  // u_i = ln q_i
  std::vector<double> q;    // simplex weights, aligned with tally systems
  bool converged = false;
  int iterations = 0;
};

/// Bradley-Terry strengths by minorization-maximization. Draws count as a
/// half win for each side. With prior = 0 the comparison graph must be
/// connected through decisive comparisons and every system needs at least
/// half a win; a positive prior lifts both requirements.
BtlResult agg_btl(const ComparisonTally& t, const BtlConfig& cfg = {});

struct PrefRecord {
  std::string system_a, system_b;
  double pref; // preference for a over b, in [-1, 1]
};

/// Signed sum of raw preference values: + when the system sits in the a
/// slot, - when in the b slot.
UtilityScores agg_ps(const std::vector<PrefRecord>& raw);
UtilityScores agg_ps(const std::vector<PrefRecord>& raw, std::vector<std::string> systems);

/// Arithmetic mean of each system's direct scores.
UtilityScores agg_mean(const std::map<std::string, std::vector<double>>& scores);

/// `system_id,utility,method` rows.
void save_utilities_csv(const UtilityScores& scores, std::ostream& out);

} // namespace prefrank

#endif
