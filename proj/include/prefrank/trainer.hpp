#ifndef PREFRANK_TRAINER_HPP
#define PREFRANK_TRAINER_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefrank/dataset.hpp"
#include "prefrank/pairgen.hpp"

namespace prefrank {

/// Additive score table: predicted score = theta[utterance] + bias[listener].
///
/// Stands in for a full quality-prediction network; training only needs
/// something that emits a per-rating score and has a well-defined gradient.
class ScoreModel {
public:
  ScoreModel() = default;
  /// Zero-initialized parameters over the given id sets.
  ScoreModel(std::vector<std::string> utterances, std::vector<std::string> listeners);

  /// theta + bias; unknown listeners contribute bias 0, unknown utterances
  /// are an error.
  double predict(const std::string& utterance_id, const std::string& listener_id) const;

  const std::vector<std::string>& utterances() const { return utterances_; }
  const std::vector<std::string>& listeners() const { return listeners_; }

  /// Dense id, or -1 when unknown.
  int utterance_index(const std::string& id) const;
  int listener_index(const std::string& id) const;

  std::vector<double>& theta_table() { return theta_; }
  std::vector<double>& bias_table() { return bias_; }
  const std::vector<double>& theta_table() const { return theta_; }
  const std::vector<double>& bias_table() const { return bias_; }

  /// utterance id -> theta, for rank comparisons.
  std::map<std::string, double> theta_map() const;

private:
  std::vector<std::string> utterances_, listeners_;
  std::unordered_map<std::string, int> utterance_idx_, listener_idx_;
  std::vector<double> theta_, bias_;
};

enum class Objective { Preference, Direct };

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  std::int64_t pairs_per_epoch = 0; // 0 means one per rating
  int batch_size = 64;
  std::uint64_t seed = 0;
  Objective objective = Objective::Preference;
};

/// Mini-batch gradient descent from a zero model, deterministic given the
/// seed. Preference: batches of same-listener rating pairs drawn by
/// sample_training_pair, squared error between the squashed predicted score
/// difference and the ground-truth outcome. Direct: batches of uniformly
/// drawn ratings, squared error between predicted and observed score.
/// The dataset must be normalized first.
ScoreModel train(const Dataset& ds, const TrainConfig& cfg);

/// Mean squared preference error of a batch; pairs index into ds.
double preference_loss(const ScoreModel& model, const Dataset& ds,
                       const std::vector<RatingPair>& pairs);

/// One gradient-descent step on a batch. Exposed so fixed-batch behavior
/// (loss decrease, gradient checks) is testable outside train().
void preference_step(ScoreModel& model, const Dataset& ds,
                     const std::vector<RatingPair>& pairs, double learning_rate);

double direct_loss(const ScoreModel& model, const Dataset& ds,
                   const std::vector<std::uint32_t>& ratings);
void direct_step(ScoreModel& model, const Dataset& ds,
                 const std::vector<std::uint32_t>& ratings, double learning_rate);

/// Compares the analytic batch gradient against central finite differences
/// on n_probes randomly chosen parameters of a randomly initialized model.
/// Returns the max relative error, denominator max(|analytic|, 1e-8).
double grad_check(const Dataset& ds, const TrainConfig& cfg, int n_probes, double epsilon);

/// Two tables: `utterance_id,theta` and `listener_id,bias`.
void save_model_csv(const ScoreModel& model, const std::string& theta_path,
                    const std::string& bias_path);
ScoreModel load_model_csv(const std::string& theta_path, const std::string& bias_path);

} // namespace prefrank

#endif
