#include "prefrank/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "prefrank/csvio.hpp"
#include "prefrank/errors.hpp"

namespace prefrank {

namespace {

int intern(const std::string& id, std::vector<std::string>& table,
           std::unordered_map<std::string, int>& index) {
  auto it = index.find(id);
  if (it != index.end()) return it->second;
  const int dense = static_cast<int>(table.size());
  table.push_back(id);
  index.emplace(id, dense);
  return dense;
}

// Reorders the interned tables lexicographically and returns old->new ids.
std::vector<int> sort_table(std::vector<std::string>& table,
                            std::unordered_map<std::string, int>& index) {
  std::vector<std::string> sorted = table;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> remap(table.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const int old = index.at(sorted[i]);
    remap[old] = static_cast<int>(i);
    index[sorted[i]] = static_cast<int>(i);
  }
  table = std::move(sorted);
  return remap;
}

} // namespace

Dataset::Dataset(std::vector<Rating> ratings, Scale scale)
    : ratings_(std::move(ratings)), scale_(scale) {
  rating_system_.reserve(ratings_.size());
  rating_listener_.reserve(ratings_.size());
  rating_utterance_.reserve(ratings_.size());
  for (const Rating& r : ratings_) {
    if (!std::isfinite(r.score))
      throw ValidationError("non-finite score for utterance '" + r.utterance_id +
                            "' by listener '" + r.listener_id + "'");
    if (r.system_id.empty() || r.utterance_id.empty() || r.listener_id.empty())
      throw ValidationError("empty id in rating of utterance '" + r.utterance_id + "'");
    rating_system_.push_back(intern(r.system_id, systems_, system_idx_));
    rating_listener_.push_back(intern(r.listener_id, listeners_, listener_idx_));
    rating_utterance_.push_back(intern(r.utterance_id, utterances_, utterance_idx_));
  }

  const std::vector<int> sys_map = sort_table(systems_, system_idx_);
  const std::vector<int> lis_map = sort_table(listeners_, listener_idx_);
  const std::vector<int> utt_map = sort_table(utterances_, utterance_idx_);
  for (std::size_t i = 0; i < ratings_.size(); ++i) {
    rating_system_[i] = sys_map[rating_system_[i]];
    rating_listener_[i] = lis_map[rating_listener_[i]];
    rating_utterance_[i] = utt_map[rating_utterance_[i]];
  }

  by_system_.resize(systems_.size());
  by_listener_.resize(listeners_.size());
  by_utterance_.resize(utterances_.size());
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(ratings_.size() * 2);
  for (std::size_t i = 0; i < ratings_.size(); ++i) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(rating_utterance_[i]) << 32) |
        static_cast<std::uint32_t>(rating_listener_[i]);
    if (!seen.insert(key).second)
      throw ValidationError("duplicate rating: utterance '" + ratings_[i].utterance_id +
                            "' already rated by listener '" + ratings_[i].listener_id + "'");
    by_system_[rating_system_[i]].push_back(static_cast<std::uint32_t>(i));
    by_listener_[rating_listener_[i]].push_back(static_cast<std::uint32_t>(i));
    by_utterance_[rating_utterance_[i]].push_back(static_cast<std::uint32_t>(i));
  }
}

int Dataset::system_index(const std::string& id) const {
  auto it = system_idx_.find(id);
  if (it == system_idx_.end()) throw ValidationError("unknown system '" + id + "'");
  return it->second;
}

int Dataset::listener_index(const std::string& id) const {
  auto it = listener_idx_.find(id);
  if (it == listener_idx_.end()) throw ValidationError("unknown listener '" + id + "'");
  return it->second;
}

int Dataset::utterance_index(const std::string& id) const {
  auto it = utterance_idx_.find(id);
  if (it == utterance_idx_.end()) throw ValidationError("unknown utterance '" + id + "'");
  return it->second;
}

static const char kHeader[] = "system_id,utterance_id,listener_id,score";

Dataset load_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw ParseError(path + ": line 1: expected header '" + std::string(kHeader) + "'");

  std::vector<Rating> ratings;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    const std::string context = path + ": line " + std::to_string(line_no);
    if (f.size() != 4)
      throw ParseError(context + ": expected 4 columns, got " + std::to_string(f.size()));
    Rating r;
    r.system_id = f[0];
    r.utterance_id = f[1];
    r.listener_id = f[2];
    r.score = parse_double(f[3], context);
    if (!std::isfinite(r.score)) throw ParseError(context + ": non-finite score");
    ratings.push_back(std::move(r));
  }
  try {
    return Dataset(std::move(ratings), Scale::Mos15);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_csv(const Dataset& ds, std::ostream& out) {
  out << kHeader << '\n';
  for (const Rating& r : ds.ratings())
    out << r.system_id << ',' << r.utterance_id << ',' << r.listener_id << ','
        << format_double(r.score) << '\n';
}

void save_csv(const Dataset& ds, const std::string& path) {
  auto out = open_output(path);
  save_csv(ds, out);
  if (!out) throw IoError("write failed: " + path);
}

Dataset normalize(const Dataset& ds) {
  if (ds.scale() == Scale::Norm11)
    throw ValidationError("dataset is already normalized");
  std::vector<Rating> ratings = ds.ratings();
  for (Rating& r : ratings) r.score = (r.score - 3.0) / 2.0;
  return Dataset(std::move(ratings), Scale::Norm11);
}

SystemTruth system_truth(const Dataset& ds) {
  if (ds.empty()) throw ValidationError("cannot compute system truth of an empty dataset");
  SystemTruth truth;
  for (std::size_t s = 0; s < ds.systems().size(); ++s) {
    const auto& idx = ds.ratings_of_system(static_cast<int>(s));
    double sum = 0.0;
    for (std::uint32_t i : idx) sum += ds.rating(i).score;
    truth[ds.systems()[s]] = sum / static_cast<double>(idx.size());
  }
  return truth;
}

namespace {

std::string padded(const char* prefix, int value, int width) {
  std::string digits = std::to_string(value);
  std::string out(prefix);
  for (int i = static_cast<int>(digits.size()); i < width; ++i) out += '0';
  return out + digits;
}

int width_for(int count) {
  int w = 1;
  for (int v = count; v >= 10; v /= 10) ++w;
  return w;
}

} // namespace

SyntheticData generate_synthetic(const SynthConfig& cfg) {
  if (cfg.n_systems < 1 || cfg.utterances_per_system < 1 || cfg.ratings_per_utterance < 1 ||
      cfg.n_listeners < 1)
    throw ValidationError("synthetic config: all counts must be positive");
  if (cfg.listener_bias_sd < 0.0 || cfg.noise_sd < 0.0)
    throw ValidationError("synthetic config: standard deviations must be >= 0");
  if (cfg.n_listeners < cfg.ratings_per_utterance)
    throw ValidationError("synthetic config: need at least ratings_per_utterance listeners (" +
                          std::to_string(cfg.ratings_per_utterance) + "), got " +
                          std::to_string(cfg.n_listeners));

  Rng rng(cfg.seed);
  const int sys_w = width_for(cfg.n_systems);
  const int utt_w = width_for(cfg.utterances_per_system);
  const int lis_w = width_for(cfg.n_listeners);
  const char* lis_prefix = cfg.fresh_listeners ? "flis" : "lis";

  std::vector<double> quality(cfg.n_systems);
  for (double& m : quality)
    m = cfg.system_quality.kind == QualityDist::Kind::Uniform
            ? rng.uniform(cfg.system_quality.a, cfg.system_quality.b)
            : rng.normal(cfg.system_quality.a, cfg.system_quality.b);

  std::vector<double> bias(cfg.n_listeners);
  for (double& b : bias) b = rng.normal(0.0, cfg.listener_bias_sd);

  std::vector<Rating> ratings;
  ratings.reserve(static_cast<std::size_t>(cfg.n_systems) * cfg.utterances_per_system *
                  cfg.ratings_per_utterance);
  SystemTruth latent;
  std::vector<int> pool(cfg.n_listeners);

  for (int s = 0; s < cfg.n_systems; ++s) {
    const std::string sys_id = padded("sys", s + 1, sys_w);
    latent[sys_id] = quality[s];
    for (int u = 0; u < cfg.utterances_per_system; ++u) {
      const std::string utt_id = sys_id + "_u" + padded("", u + 1, utt_w);
      // ratings_per_utterance distinct listeners, uniform without replacement
      for (int i = 0; i < cfg.n_listeners; ++i) pool[i] = i;
      for (int i = 0; i < cfg.ratings_per_utterance; ++i) {
        const int j = i + static_cast<int>(rng.uniform_index(cfg.n_listeners - i));
        std::swap(pool[i], pool[j]);
        const int l = pool[i];
        double score = quality[s] + bias[l] + rng.normal(0.0, cfg.noise_sd);
        if (cfg.quantize) score = std::round(score);
        score = std::min(5.0, std::max(1.0, score));
        ratings.push_back(Rating{sys_id, utt_id, padded(lis_prefix, l + 1, lis_w), score});
      }
    }
  }
  return SyntheticData{Dataset(std::move(ratings), Scale::Mos15), std::move(latent)};
}

std::pair<Dataset, Dataset> split_ratings(const Dataset& ds, double dev_fraction, Rng& rng) {
  if (dev_fraction < 0.0 || dev_fraction >= 1.0)
    throw ValidationError("dev_fraction must be in [0, 1)");
  std::vector<char> to_dev(ds.size(), 0);
  std::vector<std::uint32_t> idx;
  for (std::size_t u = 0; u < ds.utterances().size(); ++u) {
    idx = ds.ratings_of_utterance(static_cast<int>(u));
    rng.shuffle(idx.data(), idx.size());
    std::size_t n_dev = static_cast<std::size_t>(
        std::floor(dev_fraction * static_cast<double>(idx.size()) + 0.5));
    if (n_dev >= idx.size()) n_dev = idx.size() - 1; // train keeps one
    if (n_dev == 0 && dev_fraction > 0.0 && idx.size() >= 2) n_dev = 1;
    for (std::size_t i = 0; i < n_dev; ++i) to_dev[idx[i]] = 1;
  }
  std::vector<Rating> train, dev;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (to_dev[i] ? dev : train).push_back(ds.rating(i));
  return {Dataset(std::move(train), ds.scale()), Dataset(std::move(dev), ds.scale())};
}

void save_truth_csv(const SystemTruth& truth, std::ostream& out, const std::string& value_column) {
  out << "system_id," << value_column << '\n';
  for (const auto& [sys, value] : truth) out << sys << ',' << format_double(value) << '\n';
}

void save_truth_csv(const SystemTruth& truth, const std::string& path,
                    const std::string& value_column) {
  auto out = open_output(path);
  save_truth_csv(truth, out, value_column);
  if (!out) throw IoError("write failed: " + path);
}

SystemTruth load_truth_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "system_id")
    throw ParseError(path + ": line 1: expected header 'system_id,<value>'");
  SystemTruth truth;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    const std::string context = path + ": line " + std::to_string(line_no);
    if (f.size() != 2) throw ParseError(context + ": expected 2 columns");
    if (!truth.emplace(f[0], parse_double(f[1], context)).second)
      throw ParseError(context + ": duplicate system '" + f[0] + "'");
  }
  return truth;
}

} // namespace prefrank
