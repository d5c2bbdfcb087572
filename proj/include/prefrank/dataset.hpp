#ifndef PREFRANK_DATASET_HPP
#define PREFRANK_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefrank/rng.hpp"

namespace prefrank {

/// One subjective score event: listener `listener_id` rated utterance
/// `utterance_id` of system `system_id`.
struct Rating {
  std::string system_id;
  std::string utterance_id;
  std::string listener_id;
  double score = 0.0;
};

/// Score scale of a dataset: raw MOS in [1,5] or normalized to [-1,1].
enum class Scale { Mos15, Norm11 };

/// Immutable collection of ratings with dense lookup indexes.
///
/// Construction validates that every (utterance, listener) pair occurs at
/// most once and that all scores are finite. Systems, listeners and
/// utterances get dense ids in lexicographic order of their string ids.
class Dataset {
public:
  Dataset() = default;
  Dataset(std::vector<Rating> ratings, Scale scale);

  const std::vector<Rating>& ratings() const { return ratings_; }
  const Rating& rating(std::size_t i) const { return ratings_[i]; }
  std::size_t size() const { return ratings_.size(); }
  bool empty() const { return ratings_.empty(); }
  Scale scale() const { return scale_; }

  const std::vector<std::string>& systems() const { return systems_; }
  const std::vector<std::string>& listeners() const { return listeners_; }
  const std::vector<std::string>& utterances() const { return utterances_; }

  /// Dense id of a system; throws ValidationError for unknown ids.
  int system_index(const std::string& id) const;
  int listener_index(const std::string& id) const;
  int utterance_index(const std::string& id) const;

  /// Rating positions, grouped by dense id.
  const std::vector<std::uint32_t>& ratings_of_system(int sys) const { return by_system_[sys]; }
  const std::vector<std::uint32_t>& ratings_of_listener(int lis) const { return by_listener_[lis]; }
  const std::vector<std::uint32_t>& ratings_of_utterance(int utt) const { return by_utterance_[utt]; }

  /// Dense ids per rating, aligned with ratings().
  int system_of(std::size_t i) const { return rating_system_[i]; }
  int listener_of(std::size_t i) const { return rating_listener_[i]; }
  int utterance_of(std::size_t i) const { return rating_utterance_[i]; }

private:
  std::vector<Rating> ratings_;
  Scale scale_ = Scale::Mos15;
  std::vector<std::string> systems_, listeners_, utterances_;
  std::unordered_map<std::string, int> system_idx_, listener_idx_, utterance_idx_;
  std::vector<std::vector<std::uint32_t>> by_system_, by_listener_, by_utterance_;
  std::vector<int> rating_system_, rating_listener_, rating_utterance_;
};

/// Per-system mean score (or latent quality, for synthetic sidecars).
using SystemTruth = std::map<std::string, double>;

struct QualityDist {
  enum class Kind { Uniform, Normal };
  Kind kind = Kind::Uniform;
  double a = 1.0; // lo for Uniform, mean for Normal
  double b = 5.0; // hi for Uniform, sd for Normal
};

/// Generator settings mirroring the shape of a large crowdsourced MOS test:
/// 175 systems, 28 utterances each, 8 ratings per utterance, 288 listeners.
struct SynthConfig {
  int n_systems = 175;
  int utterances_per_system = 28;
  int ratings_per_utterance = 8;
  int n_listeners = 288;
  QualityDist system_quality;
  double listener_bias_sd = 0.3;
  double noise_sd = 0.5;
  bool quantize = true;
  bool fresh_listeners = false; // disjoint listener id namespace
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;
  SystemTruth latent; // system id -> latent quality m_i
};

/// Loads `system_id,utterance_id,listener_id,score` rows. The result is
/// tagged Scale::Mos15; row order is preserved.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& ds, std::ostream& out);
void save_csv(const Dataset& ds, const std::string& path);

/// Maps every score by s -> (s - 3) / 2. Rejects already-normalized input.
Dataset normalize(const Dataset& ds);

/// Per-system arithmetic mean over all ratings of that system.
SystemTruth system_truth(const Dataset& ds);

/// Draws a synthetic dataset: latent quality per system, additive Gaussian
/// listener bias, Gaussian noise, optional rounding to integer MOS. Scores
/// are clipped to [1,5]. Deterministic given cfg.seed.
SyntheticData generate_synthetic(const SynthConfig& cfg);

/// Splits ratings per utterance: about dev_fraction of each utterance's
/// ratings (at least one when possible) go to dev, the rest stay in train.
/// Every utterance keeps at least one training rating.
std::pair<Dataset, Dataset> split_ratings(const Dataset& ds, double dev_fraction, Rng& rng);

/// Sidecar `system_id,latent_quality` (any 2-column header is accepted on load).
void save_truth_csv(const SystemTruth& truth, std::ostream& out, const std::string& value_column = "latent_quality");
void save_truth_csv(const SystemTruth& truth, const std::string& path, const std::string& value_column = "latent_quality");
SystemTruth load_truth_csv(const std::string& path);

} // namespace prefrank

#endif
