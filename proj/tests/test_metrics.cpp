#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dualtier/metrics.hpp"

using namespace dualtier;

TEST_CASE("confusion counts co-occurrences") {
  SECTION("perfect predictions are diagonal") {
    const std::vector<std::string> y{"a", "b", "a", "c"};
    const ConfusionMatrix m = confusion(y, y);
    CHECK(m.at(m.index_of("a"), m.index_of("a")) == 2);
    CHECK(m.at(m.index_of("b"), m.index_of("b")) == 1);
    CHECK(m.at(m.index_of("a"), m.index_of("b")) == 0);
    CHECK(m.total() == 4);
  }
  SECTION("hand-counted example") {
    const ConfusionMatrix m = confusion({"A", "A", "B"}, {"A", "B", "B"});
    CHECK(m.at(0, 0) == 1);  // A -> A
    CHECK(m.at(0, 1) == 1);  // A -> B
    CHECK(m.at(1, 1) == 1);  // B -> B
    CHECK(m.at(1, 0) == 0);
  }
  SECTION("length mismatch errors") {
    CHECK_THROWS_AS(confusion({"a"}, {"a", "b"}), DataError);
  }
  SECTION("random labels match brute-force counting") {
    Rng rng(31);
    const std::vector<std::string> names{"w", "x", "y", "z"};
    std::vector<std::string> y_true, y_pred;
    for (int i = 0; i < 1000; ++i) {
      y_true.push_back(names[rng.index(4)]);
      y_pred.push_back(names[rng.index(4)]);
    }
    const ConfusionMatrix m = confusion(y_true, y_pred, names);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        std::int64_t count = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
          if (y_true[i] == names[a] && y_pred[i] == names[b]) ++count;
        }
        CHECK(m.at(a, b) == count);
      }
    }
    CHECK(m.total() == 1000);
  }
}

namespace {

ConfusionMatrix binary_matrix(std::int64_t tp, std::int64_t tn, std::int64_t fp,
                              std::int64_t fn) {
  ConfusionMatrix m;
  m.class_names = {"pos", "neg"};
  m.counts = {tp, fn, fp, tn};
  return m;
}

}  // namespace

TEST_CASE("binary_metrics applies the percent-scale formulas") {
  SECTION("TP=50 TN=40 FP=5 FN=5") {
    const MetricsReport r = binary_metrics(binary_matrix(50, 40, 5, 5), "pos");
    CHECK(r.accuracy == Catch::Approx(90.0));
    const auto& pos = r.for_class("pos");
    CHECK(pos.precision == Catch::Approx(50.0 / 55.0 * 100.0));
    CHECK(pos.recall == Catch::Approx(50.0 / 55.0 * 100.0));
    CHECK(pos.f1 == Catch::Approx(50.0 / 55.0 * 100.0));
  }
  SECTION("absent positives: recall is 0 by convention") {
    const MetricsReport r = binary_metrics(binary_matrix(0, 10, 2, 0), "pos");
    CHECK(r.for_class("pos").recall == 0.0);
    CHECK(r.for_class("pos").f1 == 0.0);
  }
  SECTION("perfect predictor scores 100 everywhere") {
    const MetricsReport r = binary_metrics(binary_matrix(7, 13, 0, 0), "pos");
    CHECK(r.accuracy == 100.0);
    CHECK(r.for_class("pos").precision == 100.0);
    CHECK(r.for_class("pos").recall == 100.0);
    CHECK(r.for_class("pos").f1 == 100.0);
  }
  SECTION("non-binary matrix is rejected") {
    const ConfusionMatrix m = confusion({"a", "b", "c"}, {"a", "b", "c"});
    CHECK_THROWS_AS(binary_metrics(m, "a"), DataError);
  }
}

TEST_CASE("binary_metrics matches direct arithmetic on random matrices") {
  Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tp = static_cast<std::int64_t>(rng.index(200));
    const auto tn = static_cast<std::int64_t>(rng.index(200));
    const auto fp = static_cast<std::int64_t>(rng.index(50));
    const auto fn = static_cast<std::int64_t>(rng.index(50));
    if (tp + tn + fp + fn == 0) continue;
    const MetricsReport r = binary_metrics(binary_matrix(tp, tn, fp, fn), "pos");

    const double accuracy =
        static_cast<double>(tp + tn) / static_cast<double>(tp + tn + fp + fn) * 100.0;
    const double precision =
        tp + fp == 0 ? 0.0
                     : static_cast<double>(tp) / static_cast<double>(tp + fp) * 100.0;
    const double recall =
        tp + fn == 0 ? 0.0
                     : static_cast<double>(tp) / static_cast<double>(tp + fn) * 100.0;
    CHECK(r.accuracy == Catch::Approx(accuracy));
    const auto& pos = r.for_class("pos");
    CHECK(pos.precision == Catch::Approx(precision));
    CHECK(pos.recall == Catch::Approx(recall));
    // F1 is the harmonic mean of precision and recall whenever both nonzero
    if (precision > 0.0 && recall > 0.0) {
      CHECK(std::abs(pos.f1 - 2.0 * precision * recall / (precision + recall)) <=
            1e-9);
    } else {
      CHECK(pos.f1 == 0.0);
    }
  }
}

TEST_CASE("multiclass_metrics computes one-vs-rest tallies") {
  SECTION("diagonal matrix scores 100") {
    const std::vector<std::string> y{"a", "a", "b", "c", "c", "c"};
    const MetricsReport r = multiclass_metrics(confusion(y, y));
    CHECK(r.accuracy == 100.0);
    CHECK(r.weighted_f1 == Catch::Approx(100.0));
    CHECK(r.macro_f1 == Catch::Approx(100.0));
  }
  SECTION("single class present: weighted F1 equals that class's F1") {
    const ConfusionMatrix m =
        confusion({"a", "a", "a"}, {"a", "a", "b"}, {"a", "b"});
    const MetricsReport r = multiclass_metrics(m);
    CHECK(r.weighted_f1 == Catch::Approx(r.for_class("a").f1));
  }
  SECTION("random 4-class matrix matches independent per-class tallies") {
    Rng rng(88);
    const std::vector<std::string> names{"a", "b", "c", "d"};
    std::vector<std::string> y_true, y_pred;
    for (int i = 0; i < 500; ++i) {
      y_true.push_back(names[rng.index(4)]);
      y_pred.push_back(names[rng.index(4)]);
    }
    const MetricsReport r = multiclass_metrics(confusion(y_true, y_pred, names));

    double weighted = 0.0, support_total = 0.0, trace = 0.0;
    for (const auto& cls : names) {
      double tp = 0, fp = 0, fn = 0, support = 0;
      for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == cls, p = y_pred[i] == cls;
        if (t) ++support;
        if (t && p) ++tp;
        if (!t && p) ++fp;
        if (t && !p) ++fn;
      }
      trace += tp;
      const double precision = tp + fp == 0 ? 0 : tp / (tp + fp) * 100;
      const double recall = tp + fn == 0 ? 0 : tp / (tp + fn) * 100;
      const double f1 =
          precision + recall == 0 ? 0 : 2 * precision * recall / (precision + recall);
      const auto& pc = r.for_class(cls);
      CHECK(pc.precision == Catch::Approx(precision));
      CHECK(pc.recall == Catch::Approx(recall));
      CHECK(pc.f1 == Catch::Approx(f1));
      CHECK(pc.support == static_cast<std::int64_t>(support));
      weighted += support * f1;
      support_total += support;
    }
    CHECK(r.accuracy == Catch::Approx(trace / 500.0 * 100.0));
    CHECK(r.weighted_f1 == Catch::Approx(weighted / support_total));
  }
  SECTION("empty matrix errors") {
    ConfusionMatrix m;
    CHECK_THROWS_AS(multiclass_metrics(m), DataError);
  }
}

TEST_CASE("accuracy equals support-weighted recall") {
  Rng rng(99);
  const std::vector<std::string> names{"a", "b", "c"};
  std::vector<std::string> y_true, y_pred;
  for (int i = 0; i < 300; ++i) {
    y_true.push_back(names[rng.index(3)]);
    y_pred.push_back(names[rng.index(3)]);
  }
  const MetricsReport r = multiclass_metrics(confusion(y_true, y_pred, names));
  double weighted_recall = 0.0, total = 0.0;
  for (const auto& pc : r.per_class) {
    weighted_recall += static_cast<double>(pc.support) * pc.recall;
    total += static_cast<double>(pc.support);
  }
  CHECK(r.accuracy == Catch::Approx(weighted_recall / total));
}

TEST_CASE("multiclass agrees with binary on 2-class matrices") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ConfusionMatrix m =
        binary_matrix(static_cast<std::int64_t>(rng.index(100)) + 1,
                      static_cast<std::int64_t>(rng.index(100)) + 1,
                      static_cast<std::int64_t>(rng.index(30)),
                      static_cast<std::int64_t>(rng.index(30)));
    const MetricsReport b = binary_metrics(m, "pos");
    const MetricsReport mc = multiclass_metrics(m);
    CHECK(b.accuracy == Catch::Approx(mc.accuracy));
    CHECK(b.for_class("pos").precision == Catch::Approx(mc.for_class("pos").precision));
    CHECK(b.for_class("pos").recall == Catch::Approx(mc.for_class("pos").recall));
    CHECK(b.for_class("pos").f1 == Catch::Approx(mc.for_class("pos").f1));
    CHECK(b.weighted_f1 == Catch::Approx(mc.weighted_f1));
  }
}

TEST_CASE("per_attack_accuracy implements the printed formula verbatim") {
  SECTION("all instances the attack, all predicted right: 100") {
    const std::vector<std::string> y(10, "dos");
    const PerAttackAccuracy a = per_attack_accuracy(y, y, "dos");
    CHECK(a.formula_value == 100.0);
    CHECK(a.conventional_recall == 100.0);
  }
  SECTION("attack absent: 0 by convention") {
    const std::vector<std::string> y(5, "probe");
    const PerAttackAccuracy a = per_attack_accuracy(y, y, "dos");
    CHECK(a.formula_value == 0.0);
    CHECK(a.conventional_recall == 0.0);
  }
  SECTION("mixed labels: hand tally; formula denominator is the whole batch") {
    // 20 labels; 8 are 'dos', 6 of them predicted 'dos'; 2 probes misread as dos
    std::vector<std::string> y_true, y_pred;
    for (int i = 0; i < 8; ++i) {
      y_true.push_back("dos");
      y_pred.push_back(i < 6 ? "dos" : "probe");
    }
    for (int i = 0; i < 12; ++i) {
      y_true.push_back("probe");
      y_pred.push_back(i < 2 ? "dos" : "probe");
    }
    const PerAttackAccuracy a = per_attack_accuracy(y_true, y_pred, "dos");
    CHECK(a.formula_value == Catch::Approx(6.0 / 20.0 * 100.0));
    CHECK(a.conventional_recall == Catch::Approx(6.0 / 8.0 * 100.0));
    CHECK(a.conventional_accuracy == Catch::Approx((6.0 + 10.0) / 20.0 * 100.0));
  }
  SECTION("explicit class set rejects unknown names") {
    const std::vector<std::string> y{"a", "b"};
    CHECK_THROWS_AS(per_attack_accuracy(y, y, "zzz", {"a", "b"}), DataError);
    CHECK_NOTHROW(per_attack_accuracy(y, y, "a", {"a", "b"}));
  }
}
