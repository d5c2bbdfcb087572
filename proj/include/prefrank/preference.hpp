#ifndef PREFRANK_PREFERENCE_HPP
#define PREFRANK_PREFERENCE_HPP

#include <cmath>
#include <string>
#include <vector>

namespace prefrank {

/// Comparison outcome with its numeric encoding.
enum class Outcome : int { Loss = -1, Draw = 0, Win = 1 };

inline int outcome_value(Outcome o) { return static_cast<int>(o); }
const char* outcome_name(Outcome o);

/// Squashes a score difference into (-1, 1): 2*sigmoid(x) - 1.
/// Computed as tanh(x/2), which is the same function without overflow.
inline double alpha(double x) { return std::tanh(0.5 * x); }

/// Predicted preference of the first score over the second.
inline double pref_pred(double score_a, double score_b) { return alpha(score_a - score_b); }

/// Ground-truth preference: sign of the score difference.
inline Outcome pref_gt(double s_a, double s_b) {
  if (s_a > s_b) return Outcome::Win;
  if (s_a < s_b) return Outcome::Loss;
  return Outcome::Draw;
}

/// Decision bounds on a preference value p in [-1, 1]:
/// p > t_win is a win, p < t_lose a loss, anything between a draw.
struct Thresholds {
  double t_lose = 0.0;
  double t_win = 0.0;
};

inline Outcome classify(double pref, const Thresholds& t) {
  if (pref > t.t_win) return Outcome::Win;
  if (pref < t.t_lose) return Outcome::Loss;
  return Outcome::Draw;
}

/// Equal Range: [-1,-1/3] loss, (-1/3,1/3) draw, [1/3,1] win.
inline Thresholds thresholds_er() { return Thresholds{-1.0 / 3.0, 1.0 / 3.0}; }

/// No Draw: any positive preference is a win, any negative a loss.
/// An exact zero (measure-zero for continuous predictions) stays a draw.
inline Thresholds thresholds_nd() { return Thresholds{0.0, 0.0}; }

/// Fits the two equal-error-rate thresholds on development predictions.
///
/// t_win minimizes |FPR - FNR| for the binary task "truth is Win" with rule
/// pred > t; t_lose symmetrically for "truth is Loss" with rule pred < t.
/// Candidates are midpoints of consecutive sorted predictions plus one
/// sentinel on each side; objective ties break toward the smaller |t|.
/// The result is clamped to t_lose <= 0 <= t_win; raw fits that cross
/// (t_win < t_lose) are rejected.
Thresholds fit_eer_thresholds(const std::vector<double>& preds,
                              const std::vector<Outcome>& truths);

std::string thresholds_to_json(const Thresholds& t);
Thresholds thresholds_from_json(const std::string& text);

} // namespace prefrank

#endif
