#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "cropweed/dataset.hpp"
#include "cropweed/objectives.hpp"
#include "cropweed/rng.hpp"

using namespace cropweed;

namespace {

Taxonomy two_by_two() {
  Taxonomy t({"crop_a", "crop_b"}, {"weed_x", "weed_y"});
  return t;
}

// Independent metric oracle: build the full confusion matrix with nested
// loops, then derive every metric from it by its defining formula.
struct ConfusionOracle {
  std::map<std::pair<int, int>, long long> cells;
  const Taxonomy& tax;

  ConfusionOracle(const LabelVector& y, const LabelVector& yhat, const Taxonomy& t) : tax(t) {
    for (size_t i = 0; i < y.size(); ++i) ++cells[{y[i], yhat[i]}];
  }
  long long total() const {
    long long n = 0;
    for (const auto& [k, v] : cells) n += v;
    return n;
  }
  double oracle_accuracy() const {
    long long ok = 0;
    for (const auto& [k, v] : cells)
      if (k.first == k.second) ok += v;
    return static_cast<double>(ok) / static_cast<double>(total());
  }
  double oracle_ckr() const {
    long long crops = 0, killed = 0;
    for (const auto& [k, v] : cells) {
      if (!tax.is_crop(k.first)) continue;
      crops += v;
      if (k.second != tax.unknown_index() && tax.is_weed(k.second)) killed += v;
    }
    return static_cast<double>(killed) / static_cast<double>(crops);
  }
  long long count_class(ErrorClass target) const {
    long long n = 0;
    for (const auto& [k, v] : cells) {
      ErrorClass got;
      if (k.first == k.second) got = ErrorClass::Correct;
      else if (k.second == tax.unknown_index()) got = ErrorClass::Moderate;
      else if (tax.group_of(k.first) == tax.group_of(k.second)) got = ErrorClass::Minor;
      else if (tax.is_weed(k.first)) got = ErrorClass::Considerable;
      else got = ErrorClass::Dangerous;
      if (got == target) n += v;
    }
    return n;
  }
};

}  // namespace

TEST_CASE("contain reproduces the documented example") {
  CHECK(contain({0, 2}, {1, 0, 2, 1}) == BitVector{0, 1, 1, 0});
  CHECK(contain({}, {1, 2}) == BitVector{0, 0});
  CHECK(contain({5}, {}) == BitVector{});
}

TEST_CASE("equal_indicator and accuracy") {
  CHECK(equal_indicator({0, 1, 2}, {0, 2, 2}) == BitVector{1, 0, 1});
  CHECK(accuracy({0, 1, 2}, {0, 2, 2}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(accuracy({0}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("the 10-sample worked example: accuracy 0.80, recall_crop 2/3") {
  Taxonomy t = two_by_two();
  const int ca = 0, cb = 1, wx = 2, wy = 3;
  // 7 weeds, 3 crops; one crop predicted as weed, one weed-side error.
  LabelVector y = {wx, wx, wx, wx, wy, wy, wy, ca, ca, cb};
  LabelVector yhat = {wx, wx, wx, wx, wy, wy, wx, ca, wx, cb};
  //                                       ^ weed-side    ^ crop->weed
  CHECK(accuracy(y, yhat) == doctest::Approx(0.80));
  CHECK(ckr(y, yhat, t) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(recall_crop(y, yhat, t) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("recall_crop counts crop-to-crop confusion as a detection") {
  Taxonomy t = two_by_two();
  // crop_a predicted as crop_b: wrong category, but not killed.
  CHECK(recall_crop({0, 0}, {1, 0}, t) == doctest::Approx(1.0));
  // Unknown prediction on a crop is not a kill either.
  CHECK(recall_crop({0, 0}, {4, 0}, t) == doctest::Approx(1.0));
  CHECK(ckr({0, 0}, {3, 4}, t) == doctest::Approx(0.5));
  // No crops: the scalar metric refuses, the report carries NaN.
  CHECK_THROWS_AS(ckr({2, 3}, {2, 3}, t), std::invalid_argument);
  CHECK(std::isnan(evaluate_predictions({2, 3}, {2, 3}, t).ckr));
  CHECK(std::isnan(evaluate_predictions({2, 3}, {2, 3}, t).recall_crop));
}

TEST_CASE("error taxonomy: the full 5x5 grid") {
  Taxonomy t = two_by_two();
  const int u = t.unknown_index();
  CHECK(classify_error(0, 0, t) == ErrorClass::Correct);
  CHECK(classify_error(3, 3, t) == ErrorClass::Correct);
  CHECK(classify_error(0, u, t) == ErrorClass::Moderate);
  CHECK(classify_error(2, u, t) == ErrorClass::Moderate);
  CHECK(classify_error(0, 1, t) == ErrorClass::Minor);  // crop as other crop
  CHECK(classify_error(2, 3, t) == ErrorClass::Minor);  // weed as other weed
  CHECK(classify_error(2, 0, t) == ErrorClass::Considerable);  // weed as crop
  CHECK(classify_error(0, 2, t) == ErrorClass::Dangerous);     // crop as weed
  CHECK_THROWS_AS(classify_error(0, 7, t), std::out_of_range);
}

TEST_CASE("NMW truth table: zero iff dangerous under text_iff") {
  Taxonomy t = two_by_two();
  for (int y = 0; y < 4; ++y)
    for (int yhat = 0; yhat <= t.unknown_index(); ++yhat) {
      BitVector bit = nmw_indicator({y}, {yhat}, t, NmwStrictness::TextIff);
      bool dangerous = classify_error(y, yhat, t) == ErrorClass::Dangerous;
      CHECK(bit[0] == (dangerous ? 0 : 1));
      // text_iff forgives weed->crop; symmetric does not.
      BitVector sym = nmw_indicator({y}, {yhat}, t, NmwStrictness::Symmetric);
      bool cross_group = yhat != t.unknown_index() &&
                         t.group_of(y) != t.group_of(yhat);
      CHECK(sym[0] == (cross_group ? 0 : 1));
    }
}

TEST_CASE("metrics match the brute-force confusion oracle on 1000 random pairs") {
  Taxonomy t = two_by_two();
  Rng rng = make_rng(2024, "metric-oracle");
  LabelVector y, yhat;
  for (int i = 0; i < 1000; ++i) {
    y.push_back(static_cast<int>(rand_below(rng, 4)));          // truths are real classes
    yhat.push_back(static_cast<int>(rand_below(rng, 5)));       // predictions may be unknown
  }
  ConfusionOracle oracle(y, yhat, t);
  EvalReport r = evaluate_predictions(y, yhat, t);
  CHECK(r.n_samples == 1000);
  CHECK(r.accuracy == oracle.oracle_accuracy());
  CHECK(r.ckr == oracle.oracle_ckr());
  CHECK(r.recall_crop == 1.0 - oracle.oracle_ckr());
  CHECK(r.correct == oracle.count_class(ErrorClass::Correct));
  CHECK(r.moderate == oracle.count_class(ErrorClass::Moderate));
  CHECK(r.minor == oracle.count_class(ErrorClass::Minor));
  CHECK(r.considerable == oracle.count_class(ErrorClass::Considerable));
  CHECK(r.dangerous == oracle.count_class(ErrorClass::Dangerous));
  CHECK(r.correct + r.moderate + r.minor + r.considerable + r.dangerous == 1000);
  // Confusion cells agree too.
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      auto it = oracle.cells.find({a, b});
      long long want = it == oracle.cells.end() ? 0 : it->second;
      CHECK(r.confusion[a][b] == want);
    }
}

TEST_CASE("surrogates: values and gradients at hand-computable points") {
  Taxonomy t = two_by_two();
  std::vector<double> probs = {0.5, 0.2, 0.2, 0.05, 0.05};  // head = C+1

  SurrogateResult cce = surrogate_loss(ObjectiveKind::CCE, probs, 0, t);
  CHECK(cce.loss == doctest::Approx(-std::log(0.5)));
  CHECK(cce.grad[0] == doctest::Approx(-1.0 / 0.5));
  CHECK(cce.grad[1] == 0.0);

  // NMW, crop truth: acceptable mass = own group + unknown = 0.5+0.2+0.05.
  SurrogateResult nmw = surrogate_loss(ObjectiveKind::NMW, probs, 0, t);
  double mass = 0.5 + 0.2 + 0.05;
  CHECK(nmw.loss == doctest::Approx(-std::log(mass)));
  CHECK(nmw.grad[0] == doctest::Approx(-1.0 / mass));
  CHECK(nmw.grad[1] == doctest::Approx(-1.0 / mass));
  CHECK(nmw.grad[4] == doctest::Approx(-1.0 / mass));
  CHECK(nmw.grad[2] == 0.0);
  CHECK(nmw.grad[3] == 0.0);

  // NMW, weed truth, text_iff: anything except crop-kill is fine -> no loss.
  SurrogateResult weed = surrogate_loss(ObjectiveKind::NMW, probs, 2, t);
  CHECK(weed.loss == 0.0);
  for (double g : weed.grad) CHECK(g == 0.0);

  // Symmetric reading does push weed mass.
  SurrogateResult sym = surrogate_loss(ObjectiveKind::NMW, probs, 2, t, NmwStrictness::Symmetric);
  double wmass = 0.2 + 0.05 + 0.05;
  CHECK(sym.loss == doctest::Approx(-std::log(wmass)));
  CHECK(sym.grad[2] == doctest::Approx(-1.0 / wmass));
  CHECK(sym.grad[0] == 0.0);

  // DM is a schedule, not a loss.
  CHECK_THROWS_AS(surrogate_loss(ObjectiveKind::DM, probs, 0, t), std::invalid_argument);
  // NMW needs the unknown slot.
  std::vector<double> four = {0.4, 0.3, 0.2, 0.1};
  CHECK_THROWS_AS(surrogate_loss(ObjectiveKind::NMW, four, 0, t), std::invalid_argument);
}

TEST_CASE("surrogate gradients match central differences on the prob simplex") {
  // Finite differences directly in probability space (the softmax pairing
  // is covered by the model-level gradient checks).
  Taxonomy t = two_by_two();
  Rng rng = make_rng(7, "surrogate-fd");
  for (auto kind : {ObjectiveKind::CCE, ObjectiveKind::NMW}) {
    for (auto strict : {NmwStrictness::TextIff, NmwStrictness::Symmetric}) {
      for (int y = 0; y < 4; ++y) {
        std::vector<double> p(5);
        double sum = 0;
        for (double& v : p) sum += (v = rand_range(rng, 0.05, 1.0));
        for (double& v : p) v /= sum;
        SurrogateResult sr = surrogate_loss(kind, p, y, t, strict);
        for (size_t j = 0; j < p.size(); ++j) {
          const double h = 1e-6;
          std::vector<double> hi = p, lo = p;
          hi[j] += h;
          lo[j] -= h;
          double num = (surrogate_loss(kind, hi, y, t, strict).loss -
                        surrogate_loss(kind, lo, y, t, strict).loss) /
                       (2 * h);
          CHECK(sr.grad[j] == doctest::Approx(num).epsilon(1e-5));
        }
      }
    }
  }
}

TEST_CASE("dm_schedule alternates starting from CCE") {
  CHECK(dm_schedule(0) == ObjectiveKind::CCE);
  CHECK(dm_schedule(1) == ObjectiveKind::NMW);
  CHECK(dm_schedule(2) == ObjectiveKind::CCE);
  CHECK(dm_schedule(101) == ObjectiveKind::NMW);
}

TEST_CASE("objective and strictness names round trip") {
  for (auto k : {ObjectiveKind::CCE, ObjectiveKind::NMW, ObjectiveKind::DM})
    CHECK(parse_objective(objective_name(k)) == k);
  for (auto s : {NmwStrictness::TextIff, NmwStrictness::Symmetric})
    CHECK(parse_strictness(strictness_name(s)) == s);
  CHECK_THROWS_AS(parse_objective("mse"), std::invalid_argument);
}
