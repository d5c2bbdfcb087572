#include "prefrank/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "prefrank/csvio.hpp"
#include "prefrank/errors.hpp"
#include "prefrank/preference.hpp"

namespace prefrank {

ScoreModel::ScoreModel(std::vector<std::string> utterances, std::vector<std::string> listeners)
    : utterances_(std::move(utterances)), listeners_(std::move(listeners)) {
  std::sort(utterances_.begin(), utterances_.end());
  std::sort(listeners_.begin(), listeners_.end());
  for (std::size_t i = 0; i + 1 < utterances_.size(); ++i)
    if (utterances_[i] == utterances_[i + 1])
      throw ValidationError("duplicate utterance '" + utterances_[i] + "' in model");
  for (std::size_t i = 0; i + 1 < listeners_.size(); ++i)
    if (listeners_[i] == listeners_[i + 1])
      throw ValidationError("duplicate listener '" + listeners_[i] + "' in model");
  for (std::size_t i = 0; i < utterances_.size(); ++i)
    utterance_idx_.emplace(utterances_[i], static_cast<int>(i));
  for (std::size_t i = 0; i < listeners_.size(); ++i)
    listener_idx_.emplace(listeners_[i], static_cast<int>(i));
  theta_.assign(utterances_.size(), 0.0);
  bias_.assign(listeners_.size(), 0.0);
}

int ScoreModel::utterance_index(const std::string& id) const {
  auto it = utterance_idx_.find(id);
  return it == utterance_idx_.end() ? -1 : it->second;
}

int ScoreModel::listener_index(const std::string& id) const {
  auto it = listener_idx_.find(id);
  return it == listener_idx_.end() ? -1 : it->second;
}

double ScoreModel::predict(const std::string& utterance_id, const std::string& listener_id) const {
  const int u = utterance_index(utterance_id);
  if (u < 0) throw ValidationError("unknown utterance '" + utterance_id + "'");
  const int l = listener_index(listener_id);
  return theta_[u] + (l >= 0 ? bias_[l] : 0.0);
}

std::map<std::string, double> ScoreModel::theta_map() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < utterances_.size(); ++i) out[utterances_[i]] = theta_[i];
  return out;
}

namespace {

// dataset dense ids -> model dense ids (-1 for listeners the model lacks)
struct ParamMap {
  std::vector<int> utt, lis;
};

ParamMap map_params(const ScoreModel& m, const Dataset& ds) {
  ParamMap pm;
  pm.utt.reserve(ds.utterances().size());
  for (const std::string& id : ds.utterances()) {
    const int u = m.utterance_index(id);
    if (u < 0) throw ValidationError("unknown utterance '" + id + "'");
    pm.utt.push_back(u);
  }
  pm.lis.reserve(ds.listeners().size());
  for (const std::string& id : ds.listeners()) pm.lis.push_back(m.listener_index(id));
  return pm;
}

struct GradBuffers {
  std::vector<double> theta, bias;
  std::vector<char> theta_touched, bias_touched;
  std::vector<int> dirty_theta, dirty_bias;

  void init(std::size_t n_theta, std::size_t n_bias) {
    theta.assign(n_theta, 0.0);
    bias.assign(n_bias, 0.0);
    theta_touched.assign(n_theta, 0);
    bias_touched.assign(n_bias, 0);
  }
  void add_theta(int i, double g) {
    if (!theta_touched[i]) {
      theta_touched[i] = 1;
      dirty_theta.push_back(i);
    }
    theta[i] += g;
  }
  void add_bias(int i, double g) {
    if (!bias_touched[i]) {
      bias_touched[i] = 1;
      dirty_bias.push_back(i);
    }
    bias[i] += g;
  }
  void reset() {
    for (int i : dirty_theta) {
      theta[i] = 0.0;
      theta_touched[i] = 0;
    }
    for (int i : dirty_bias) {
      bias[i] = 0.0;
      bias_touched[i] = 0;
    }
    dirty_theta.clear();
    dirty_bias.clear();
  }
};

// Mean squared preference error over the batch and, when gb is given, its
// gradient. d alpha(x)/dx = (1 - alpha(x)^2) / 2.
double preference_pass(const ScoreModel& m, const Dataset& ds, const ParamMap& pm,
                       const std::vector<RatingPair>& pairs, GradBuffers* gb) {
  if (pairs.empty()) throw ValidationError("empty batch");
  const std::vector<double>& theta = m.theta_table();
  const std::vector<double>& bias = m.bias_table();
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  double loss = 0.0;
  for (const RatingPair& p : pairs) {
    const int ua = pm.utt[ds.utterance_of(p.first)];
    const int ub = pm.utt[ds.utterance_of(p.second)];
    const int la = pm.lis[ds.listener_of(p.first)];
    const int lb = pm.lis[ds.listener_of(p.second)];
    const double sa = theta[ua] + (la >= 0 ? bias[la] : 0.0);
    const double sb = theta[ub] + (lb >= 0 ? bias[lb] : 0.0);
    const double a = alpha(sa - sb);
    const double target = outcome_value(pref_gt(ds.rating(p.first).score, ds.rating(p.second).score));
    const double diff = a - target;
    loss += diff * diff;
    if (gb) {
      const double dd = inv_n * diff * (1.0 - a * a); // 2*diff * alpha'
      gb->add_theta(ua, dd);
      gb->add_theta(ub, -dd);
      if (la >= 0) gb->add_bias(la, dd);
      if (lb >= 0) gb->add_bias(lb, -dd);
    }
  }
  return loss * inv_n;
}

double direct_pass(const ScoreModel& m, const Dataset& ds, const ParamMap& pm,
                   const std::vector<std::uint32_t>& ratings, GradBuffers* gb) {
  if (ratings.empty()) throw ValidationError("empty batch");
  const std::vector<double>& theta = m.theta_table();
  const std::vector<double>& bias = m.bias_table();
  const double inv_n = 1.0 / static_cast<double>(ratings.size());
  double loss = 0.0;
  for (std::uint32_t r : ratings) {
    const int u = pm.utt[ds.utterance_of(r)];
    const int l = pm.lis[ds.listener_of(r)];
    const double s = theta[u] + (l >= 0 ? bias[l] : 0.0);
    const double diff = s - ds.rating(r).score;
    loss += diff * diff;
    if (gb) {
      const double dd = 2.0 * inv_n * diff;
      gb->add_theta(u, dd);
      if (l >= 0) gb->add_bias(l, dd);
    }
  }
  return loss * inv_n;
}

void apply_step(ScoreModel& m, GradBuffers& gb, double lr) {
  std::vector<double>& theta = m.theta_table();
  std::vector<double>& bias = m.bias_table();
  for (int i : gb.dirty_theta) theta[i] -= lr * gb.theta[i];
  for (int i : gb.dirty_bias) bias[i] -= lr * gb.bias[i];
  gb.reset();
}

void check_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (cfg.epochs < 0) throw ValidationError("epochs must be >= 0");
  if (cfg.batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (cfg.pairs_per_epoch < 0) throw ValidationError("pairs_per_epoch must be >= 0");
}

} // namespace

double preference_loss(const ScoreModel& model, const Dataset& ds,
                       const std::vector<RatingPair>& pairs) {
  return preference_pass(model, ds, map_params(model, ds), pairs, nullptr);
}

void preference_step(ScoreModel& model, const Dataset& ds,
                     const std::vector<RatingPair>& pairs, double learning_rate) {
  GradBuffers gb;
  gb.init(model.theta_table().size(), model.bias_table().size());
  preference_pass(model, ds, map_params(model, ds), pairs, &gb);
  apply_step(model, gb, learning_rate);
}

double direct_loss(const ScoreModel& model, const Dataset& ds,
                   const std::vector<std::uint32_t>& ratings) {
  return direct_pass(model, ds, map_params(model, ds), ratings, nullptr);
}

void direct_step(ScoreModel& model, const Dataset& ds,
                 const std::vector<std::uint32_t>& ratings, double learning_rate) {
  GradBuffers gb;
  gb.init(model.theta_table().size(), model.bias_table().size());
  direct_pass(model, ds, map_params(model, ds), ratings, &gb);
  apply_step(model, gb, learning_rate);
}

ScoreModel train(const Dataset& ds, const TrainConfig& cfg) {
  check_config(cfg);
  if (ds.empty()) throw ValidationError("cannot train on an empty dataset");
  if (ds.scale() != Scale::Norm11)
    throw ValidationError("training expects a normalized dataset");

  ScoreModel model(ds.utterances(), ds.listeners());
  const ParamMap pm = map_params(model, ds);
  GradBuffers gb;
  gb.init(model.theta_table().size(), model.bias_table().size());
  Rng rng(cfg.seed);
  const std::int64_t per_epoch =
      cfg.pairs_per_epoch > 0 ? cfg.pairs_per_epoch : static_cast<std::int64_t>(ds.size());

  if (cfg.objective == Objective::Preference) {
    const std::vector<int> eligible = eligible_listeners(ds);
    if (eligible.empty()) throw ValidationError("no listener with at least two ratings");
    std::vector<RatingPair> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (std::int64_t done = 0; done < per_epoch;) {
        const std::int64_t n =
            std::min<std::int64_t>(cfg.batch_size, per_epoch - done);
        batch.clear();
        for (std::int64_t i = 0; i < n; ++i)
          batch.push_back(sample_training_pair(ds, eligible, rng));
        preference_pass(model, ds, pm, batch, &gb);
        apply_step(model, gb, cfg.learning_rate);
        done += n;
      }
    }
  } else {
    std::vector<std::uint32_t> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (std::int64_t done = 0; done < per_epoch;) {
        const std::int64_t n =
            std::min<std::int64_t>(cfg.batch_size, per_epoch - done);
        batch.clear();
        for (std::int64_t i = 0; i < n; ++i)
          batch.push_back(static_cast<std::uint32_t>(rng.uniform_index(ds.size())));
        direct_pass(model, ds, pm, batch, &gb);
        apply_step(model, gb, cfg.learning_rate);
        done += n;
      }
    }
  }
  return model;
}

double grad_check(const Dataset& ds, const TrainConfig& cfg, int n_probes, double epsilon) {
  check_config(cfg);
  if (n_probes < 1) throw ValidationError("n_probes must be >= 1");
  if (epsilon < 1e-7 || epsilon > 1e-4)
    throw ValidationError("epsilon must lie in [1e-7, 1e-4]");
  if (ds.empty()) throw ValidationError("cannot check gradients on an empty dataset");

  Rng rng(cfg.seed);
  ScoreModel model(ds.utterances(), ds.listeners());
  for (double& t : model.theta_table()) t = rng.normal(0.0, 0.1);
  for (double& b : model.bias_table()) b = rng.normal(0.0, 0.1);
  const ParamMap pm = map_params(model, ds);

  std::vector<RatingPair> pairs;
  std::vector<std::uint32_t> ratings;
  if (cfg.objective == Objective::Preference) {
    const std::vector<int> eligible = eligible_listeners(ds);
    if (eligible.empty()) throw ValidationError("no listener with at least two ratings");
    for (int i = 0; i < cfg.batch_size; ++i)
      pairs.push_back(sample_training_pair(ds, eligible, rng));
  } else {
    for (int i = 0; i < cfg.batch_size; ++i)
      ratings.push_back(static_cast<std::uint32_t>(rng.uniform_index(ds.size())));
  }

  auto loss = [&]() {
    return cfg.objective == Objective::Preference
               ? preference_pass(model, ds, pm, pairs, nullptr)
               : direct_pass(model, ds, pm, ratings, nullptr);
  };
  GradBuffers gb;
  gb.init(model.theta_table().size(), model.bias_table().size());
  if (cfg.objective == Objective::Preference)
    preference_pass(model, ds, pm, pairs, &gb);
  else
    direct_pass(model, ds, pm, ratings, &gb);

  const std::size_t n_theta = model.theta_table().size();
  const std::size_t n_params = n_theta + model.bias_table().size();
  double max_rel = 0.0;
  for (int probe = 0; probe < n_probes; ++probe) {
    const std::size_t p = rng.uniform_index(n_params);
    double& param = p < n_theta ? model.theta_table()[p] : model.bias_table()[p - n_theta];
    const double analytic = p < n_theta ? gb.theta[p] : gb.bias[p - n_theta];
    const double saved = param;
    param = saved + epsilon;
    const double up = loss();
    param = saved - epsilon;
    const double down = loss();
    param = saved;
    const double fd = (up - down) / (2.0 * epsilon);
    const double rel = std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-8);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

namespace {

std::vector<std::pair<std::string, double>> load_table(const std::string& path,
                                                       const char* header) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw ParseError(path + ": line 1: expected header '" + std::string(header) + "'");
  std::vector<std::pair<std::string, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    const std::string context = path + ": line " + std::to_string(line_no);
    if (f.size() != 2) throw ParseError(context + ": expected 2 columns");
    const double value = parse_double(f[1], context);
    if (!std::isfinite(value)) throw ParseError(context + ": non-finite value");
    rows.emplace_back(f[0], value);
  }
  return rows;
}

} // namespace

void save_model_csv(const ScoreModel& model, const std::string& theta_path,
                    const std::string& bias_path) {
  for (double t : model.theta_table())
    if (!std::isfinite(t)) throw ValidationError("model has non-finite theta");
  for (double b : model.bias_table())
    if (!std::isfinite(b)) throw ValidationError("model has non-finite bias");

  auto theta_out = open_output(theta_path);
  theta_out << "utterance_id,theta\n";
  for (std::size_t i = 0; i < model.utterances().size(); ++i)
    theta_out << model.utterances()[i] << ',' << format_double(model.theta_table()[i]) << '\n';
  if (!theta_out) throw IoError("write failed: " + theta_path);

  auto bias_out = open_output(bias_path);
  bias_out << "listener_id,bias\n";
  for (std::size_t i = 0; i < model.listeners().size(); ++i)
    bias_out << model.listeners()[i] << ',' << format_double(model.bias_table()[i]) << '\n';
  if (!bias_out) throw IoError("write failed: " + bias_path);
}

ScoreModel load_model_csv(const std::string& theta_path, const std::string& bias_path) {
  const auto theta_rows = load_table(theta_path, "utterance_id,theta");
  const auto bias_rows = load_table(bias_path, "listener_id,bias");

  std::vector<std::string> utterances, listeners;
  utterances.reserve(theta_rows.size());
  for (const auto& [id, value] : theta_rows) {
    (void)value;
    utterances.push_back(id);
  }
  listeners.reserve(bias_rows.size());
  for (const auto& [id, value] : bias_rows) {
    (void)value;
    listeners.push_back(id);
  }

  ScoreModel model(std::move(utterances), std::move(listeners));
  for (const auto& [id, value] : theta_rows)
    model.theta_table()[model.utterance_index(id)] = value;
  for (const auto& [id, value] : bias_rows)
    model.bias_table()[model.listener_index(id)] = value;
  return model;
}

} // namespace prefrank
