#include "prefrank/preference.hpp"

#include <algorithm>
#include <cstdint>

#include <json.hpp>

#include "prefrank/errors.hpp"

namespace prefrank {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Win: return "win";
    case Outcome::Draw: return "draw";
    case Outcome::Loss: return "loss";
  }
  return "?";
}

namespace {

// One-sided EER fit: rule "pred > t" (flip=false) or "pred < t" (flip=true)
// against the given positive class.
double fit_one_threshold(const std::vector<double>& preds,
                         const std::vector<Outcome>& truths, Outcome positive,
                         bool flip) {
  std::vector<double> values = preds;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t m = values.size();

  // pos_ge[j] / neg_ge[j]: class counts among predictions >= values[j]
  std::vector<std::int64_t> pos_ge(m + 1, 0), neg_ge(m + 1, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(), preds[i]) - values.begin());
    (truths[i] == positive ? pos_ge : neg_ge)[j] += 1;
  }
  for (std::size_t j = m; j-- > 0;) {
    pos_ge[j] += pos_ge[j + 1];
    neg_ge[j] += neg_ge[j + 1];
  }
  const std::int64_t n_pos = pos_ge[0];
  const std::int64_t n_neg = neg_ge[0];
  if (n_pos == 0 || n_neg == 0)
    throw ValidationError(std::string("EER fit: no '") + outcome_name(positive) +
                          "' (or no other outcome) in the development truths");

  // |FPR - FNR| compared exactly via the common-denominator numerator
  double best_t = 0.0;
  std::int64_t best_obj = -1;
  for (std::size_t j = 0; j <= m; ++j) {
    double t;
    if (j == 0)
      t = values.front() - 1.0;
    else if (j == m)
      t = values.back() + 1.0;
    else
      t = 0.5 * (values[j - 1] + values[j]);

    // with threshold between values[j-1] and values[j], "pred > t" selects
    // indices >= j and "pred < t" selects indices < j
    std::int64_t fpr_num, fnr_num;
    if (!flip) {
      fpr_num = neg_ge[j];
      fnr_num = n_pos - pos_ge[j];
    } else {
      fpr_num = n_neg - neg_ge[j];
      fnr_num = pos_ge[j];
    }
    const std::int64_t obj = std::abs(fpr_num * n_pos - fnr_num * n_neg);
    const bool better =
        best_obj < 0 || obj < best_obj ||
        (obj == best_obj && (std::abs(t) < std::abs(best_t) ||
                             (std::abs(t) == std::abs(best_t) && t < best_t)));
    if (better) {
      best_obj = obj;
      best_t = t;
    }
  }
  return best_t;
}

} // namespace

Thresholds fit_eer_thresholds(const std::vector<double>& preds,
                              const std::vector<Outcome>& truths) {
  if (preds.size() != truths.size())
    throw ValidationError("EER fit: preds and truths differ in length");
  if (preds.size() < 2)
    throw ValidationError("EER fit: need at least 2 samples");

  const double t_win = fit_one_threshold(preds, truths, Outcome::Win, false);
  const double t_lose = fit_one_threshold(preds, truths, Outcome::Loss, true);
  if (t_win < t_lose)
    throw ValidationError("EER fit: thresholds crossed (t_win " +
                          std::to_string(t_win) + " < t_lose " +
                          std::to_string(t_lose) + ")");
  return Thresholds{std::min(0.0, t_lose), std::max(0.0, t_win)};
}

std::string thresholds_to_json(const Thresholds& t) {
  nlohmann::json j;
  j["t_lose"] = t.t_lose;
  j["t_win"] = t.t_win;
  return j.dump();
}

Thresholds thresholds_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("t_lose") || !j.contains("t_win"))
    throw ParseError("thresholds JSON must be an object with t_lose and t_win");
  Thresholds t{j.at("t_lose").get<double>(), j.at("t_win").get<double>()};
  if (!(t.t_lose <= 0.0) || !(t.t_win >= 0.0) || t.t_lose < -1.0 || t.t_win > 1.0)
    throw ValidationError("thresholds out of range: need -1 <= t_lose <= 0 <= t_win <= 1");
  return t;
}

} // namespace prefrank
