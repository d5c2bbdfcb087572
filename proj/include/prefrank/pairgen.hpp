#ifndef PREFRANK_PAIRGEN_HPP
#define PREFRANK_PAIRGEN_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "prefrank/dataset.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

/// Multiset of unordered system pairs over dense indices 0..n_systems-1.
/// Stored canonically (first < second); orientation is decided at
/// realization time.
class PairPlan {
public:
  PairPlan() = default;
  explicit PairPlan(int n_systems);

  int n_systems() const { return n_systems_; }
  std::int64_t total() const { return total_; }

  std::int64_t count(int a, int b) const;
  void add(int a, int b, std::int64_t count = 1);

  /// Number of pair instances each system participates in.
  std::vector<std::int64_t> incidence() const;

  /// Visits pairs with nonzero count in ascending (first, second) order.
  template <typename Fn> // Fn(int a, int b, std::int64_t count)
  void for_each(Fn&& fn) const {
    std::size_t idx = 0;
    for (int a = 0; a < n_systems_; ++a)
      for (int b = a + 1; b < n_systems_; ++b, ++idx)
        if (counts_[idx] > 0) fn(a, b, counts_[idx]);
  }

private:
  std::size_t slot(int a, int b) const;
  int n_systems_ = 0;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> counts_; // triangular, (a,b) with a < b
};

enum class PairMethod { Rand, Link, Bs };

const char* pair_method_name(PairMethod m); // "RAND", "LINK", "BS"
PairMethod pair_method_from_name(const std::string& name);

/// K independent uniform draws over all C(N,2) unordered pairs.
PairPlan gen_rand(int n_systems, std::int64_t k, Rng& rng);

/// K/N shuffled-ring rounds; every system appears in exactly 2K/N pairs.
/// K must be a positive multiple of N, and N >= 3.
PairPlan gen_link(int n_systems, std::int64_t k, Rng& rng);

/// Balanced full cross: every unordered pair K / C(N,2) times.
/// K must be a positive multiple of C(N,2).
PairPlan gen_bs(int n_systems, std::int64_t k);

std::int64_t pair_combinations(int n_systems);

/// Dispatches to the generator for `m` (BS leaves the generator untouched).
PairPlan generate_plan(PairMethod m, int n_systems, std::int64_t k, Rng& rng);

/// Throws the generator's precondition error without building a plan.
void check_plan_args(PairMethod m, int n_systems, std::int64_t k);

/// Two realized ratings, as positions into the dataset they were drawn from.
struct RatingPair {
  std::uint32_t first = 0;
  std::uint32_t second = 0;
  bool same_listener = false;
};

struct RealizedPairs {
  std::vector<RatingPair> pairs;
  std::int64_t fallback_count = 0; // constrained instances realized unconstrained
};

/// Realizes a plan against a dataset, one RatingPair per plan instance.
///
/// Precomputes per-system rating groups once; realize() is const and safe
/// to call from several threads with independent generators.
class PairRealizer {
public:
  explicit PairRealizer(const Dataset& ds);

  /// Orientation per instance is a fair coin. Without the constraint, one
  /// rating is drawn uniformly from each system. With it, a listener who
  /// rated both systems is drawn uniformly, then one rating of each system
  /// by that listener. A constrained pair with no common listener throws
  /// when strict, otherwise falls back to unconstrained sampling for that
  /// instance and counts it.
  RealizedPairs realize(const PairPlan& plan, bool same_listener, bool strict,
                        Rng& rng) const;

  const Dataset& dataset() const { return ds_; }

private:
  struct ListenerGroup {
    int listener;
    std::uint32_t begin, end; // range in group_ratings_
  };
  const Dataset& ds_;
  // per system: ratings grouped by listener, listeners ascending
  std::vector<std::vector<ListenerGroup>> groups_;
  std::vector<std::vector<std::uint32_t>> group_ratings_;

  const std::vector<std::uint32_t>* ratings_by(int system, int listener) const;
};

RealizedPairs realize_plan(const PairPlan& plan, const Dataset& ds, bool same_listener,
                           bool strict, Rng& rng);

/// Training-phase pair: a listener with at least two ratings is drawn
/// uniformly, then two of their ratings without replacement. The two
/// ratings may come from the same system.
RatingPair sample_training_pair(const Dataset& ds, Rng& rng);

/// Dense ids of listeners with at least two ratings.
std::vector<int> eligible_listeners(const Dataset& ds);

/// Same draw as above with the eligible set precomputed, for tight loops.
RatingPair sample_training_pair(const Dataset& ds, const std::vector<int>& eligible, Rng& rng);

/// `system_a,system_b,count` rows, systems named through `labels`.
void save_plan_csv(const PairPlan& plan, const std::vector<std::string>& labels,
                   std::ostream& out);

struct LabeledPlanRow {
  std::string system_a, system_b;
  std::int64_t count;
};
std::vector<LabeledPlanRow> load_plan_csv(const std::string& path);

/// Rebinds loaded rows to a dataset's dense system indices.
PairPlan bind_plan(const std::vector<LabeledPlanRow>& rows, const Dataset& ds);

/// `sys_a,utt_a,lis_a,score_a,sys_b,utt_b,lis_b,score_b` rows.
void save_pairs_csv(const std::vector<RatingPair>& pairs, const Dataset& ds,
                    std::ostream& out);

} // namespace prefrank

#endif
