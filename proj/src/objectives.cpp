#include "cropweed/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cropweed {

namespace {
constexpr double kProbFloor = 1e-12;

void check_lengths(const LabelVector& y, const LabelVector& yhat) {
  if (y.size() != yhat.size())
    throw std::invalid_argument("label vectors differ in length: " + std::to_string(y.size()) +
                                " vs " + std::to_string(yhat.size()));
}
}  // namespace

std::string objective_name(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::CCE: return "cce";
    case ObjectiveKind::NMW: return "nmw";
    default: return "dm";
  }
}

ObjectiveKind parse_objective(const std::string& s) {
  if (s == "cce") return ObjectiveKind::CCE;
  if (s == "nmw") return ObjectiveKind::NMW;
  if (s == "dm") return ObjectiveKind::DM;
  throw std::invalid_argument("unknown objective '" + s + "' (expected cce, nmw or dm)");
}

std::string strictness_name(NmwStrictness s) {
  return s == NmwStrictness::TextIff ? "text_iff" : "symmetric";
}

NmwStrictness parse_strictness(const std::string& s) {
  if (s == "text_iff") return NmwStrictness::TextIff;
  if (s == "symmetric") return NmwStrictness::Symmetric;
  throw std::invalid_argument("unknown NMW strictness '" + s + "'");
}

std::string error_class_name(ErrorClass e) {
  switch (e) {
    case ErrorClass::Correct: return "correct";
    case ErrorClass::Moderate: return "moderate";
    case ErrorClass::Minor: return "minor";
    case ErrorClass::Considerable: return "considerable";
    default: return "dangerous";
  }
}

BitVector equal_indicator(const LabelVector& y, const LabelVector& yhat) {
  check_lengths(y, yhat);
  BitVector out(y.size());
  for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] == yhat[i] ? 1 : 0;
  return out;
}

BitVector contain(const std::vector<int>& template_cats, const LabelVector& target) {
  BitVector out(target.size(), 0);
  for (size_t i = 0; i < target.size(); ++i)
    out[i] = std::find(template_cats.begin(), template_cats.end(), target[i]) !=
                     template_cats.end()
                 ? 1
                 : 0;
  return out;
}

BitVector nmw_indicator(const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax,
                        NmwStrictness strictness) {
  check_lengths(y, yhat);
  BitVector out(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    Group gy = tax.group_of(y[i]);
    Group gp = tax.group_of(yhat[i]);
    if (strictness == NmwStrictness::TextIff) {
      out[i] = (gy == Group::Crop && gp == Group::Weed) ? 0 : 1;
    } else {
      out[i] = (y[i] == yhat[i] || gy == gp || gp == Group::Unknown) ? 1 : 0;
    }
  }
  return out;
}

double accuracy(const LabelVector& y, const LabelVector& yhat) {
  check_lengths(y, yhat);
  if (y.empty()) throw std::invalid_argument("accuracy: empty label vectors");
  BitVector eq = equal_indicator(y, yhat);
  long long hits = 0;
  for (uint8_t b : eq) hits += b;
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

double ckr(const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax) {
  check_lengths(y, yhat);
  long long crops = 0;
  long long killed = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (tax.group_of(y[i]) != Group::Crop) continue;
    ++crops;
    if (tax.group_of(yhat[i]) == Group::Weed) ++killed;
  }
  if (crops == 0) throw std::invalid_argument("ckr: no crop-labeled samples");
  return static_cast<double>(killed) / static_cast<double>(crops);
}

double recall_crop(const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax) {
  return 1.0 - ckr(y, yhat, tax);
}

ErrorClass classify_error(int y, int yhat, const Taxonomy& tax) {
  if (y == yhat) return ErrorClass::Correct;
  Group gp = tax.group_of(yhat);
  if (gp == Group::Unknown) return ErrorClass::Moderate;
  Group gy = tax.group_of(y);
  if (gy == gp) return ErrorClass::Minor;
  if (gy == Group::Weed && gp == Group::Crop) return ErrorClass::Considerable;
  return ErrorClass::Dangerous;  // crop predicted as weed
}

EvalReport evaluate_predictions(const LabelVector& y, const LabelVector& yhat,
                                const Taxonomy& tax) {
  check_lengths(y, yhat);
  if (y.empty()) throw std::invalid_argument("evaluate_predictions: empty input");
  EvalReport r;
  r.n_samples = static_cast<long long>(y.size());
  int side = tax.size() + 1;
  r.confusion.assign(side, std::vector<long long>(side, 0));
  long long crops = 0;
  long long killed = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    r.confusion[y[i]][yhat[i]] += 1;
    switch (classify_error(y[i], yhat[i], tax)) {
      case ErrorClass::Correct: ++r.correct; break;
      case ErrorClass::Moderate: ++r.moderate; break;
      case ErrorClass::Minor: ++r.minor; break;
      case ErrorClass::Considerable: ++r.considerable; break;
      case ErrorClass::Dangerous: ++r.dangerous; break;
    }
    if (tax.group_of(y[i]) == Group::Crop) {
      ++crops;
      if (tax.group_of(yhat[i]) == Group::Weed) ++killed;
    }
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.n_samples);
  if (crops > 0) {
    r.ckr = static_cast<double>(killed) / static_cast<double>(crops);
    r.recall_crop = 1.0 - r.ckr;
  } else {
    r.ckr = std::numeric_limits<double>::quiet_NaN();
    r.recall_crop = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

SurrogateResult surrogate_loss(ObjectiveKind kind, std::span<const double> probs, int y,
                               const Taxonomy& tax, NmwStrictness strictness) {
  const int n = static_cast<int>(probs.size());
  SurrogateResult out;
  out.grad.assign(probs.size(), 0.0);

  if (kind == ObjectiveKind::CCE) {
    if (y < 0 || y >= n) throw std::invalid_argument("surrogate_loss: label outside output range");
    double p = probs[y] + kProbFloor;
    out.loss = -std::log(p);
    out.grad[y] = -1.0 / p;
    return out;
  }
  if (kind != ObjectiveKind::NMW)
    throw std::invalid_argument("surrogate_loss: DM resolves to CCE/NMW via dm_schedule");

  if (n != tax.size() + 1)
    throw std::invalid_argument("surrogate_loss: NMW needs the unknown class in the output head");
  Group gy = tax.group_of(y);
  if (strictness == NmwStrictness::TextIff && gy == Group::Weed) {
    out.loss = 0.0;  // weed samples carry no NMW penalty under the iff reading
    return out;
  }
  // acceptable mass: same group plus unknown; for crops this is everything
  // that is not a weed
  double mass = 0.0;
  std::vector<uint8_t> acceptable(n, 0);
  for (int j = 0; j < n; ++j) {
    Group gj = tax.group_of(j);
    if (gj == gy || gj == Group::Unknown) {
      acceptable[j] = 1;
      mass += probs[j];
    }
  }
  double s = mass + kProbFloor;
  out.loss = -std::log(s);
  for (int j = 0; j < n; ++j)
    if (acceptable[j]) out.grad[j] = -1.0 / s;
  return out;
}

ObjectiveKind dm_schedule(long long batch_index) {
  return batch_index % 2 == 0 ? ObjectiveKind::CCE : ObjectiveKind::NMW;
}

}  // namespace cropweed
