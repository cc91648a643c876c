#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "riskcal/losses.hpp"
#include "riskcal/rng.hpp"
#include "support/finite_diff.hpp"

using namespace riskcal;
using doctest::Approx;

namespace {

ClassTaxonomy four_class() {
    return make_taxonomy({"B1", "B2", "M1", "M2"}, {0, 0, 1, 1});
}

std::vector<double> random_logits(Rng& rng, int k, double lo = -2.0,
                                  double hi = 2.0) {
    std::vector<double> logits(k);
    for (double& z : logits) z = rng.uniform(lo, hi);
    return logits;
}

// Margin between the top two logits, to keep finite differences away from
// the argmax discontinuity of the RCL multiplier.
double top_two_gap(const std::vector<double>& logits) {
    double best = -1e300, second = -1e300;
    for (double z : logits) {
        if (z > best) {
            second = best;
            best = z;
        } else if (z > second) {
            second = z;
        }
    }
    return best - second;
}

}  // namespace

TEST_CASE("softmax basics") {
    const std::vector<double> uniform = softmax(std::vector<double>{0, 0, 0, 0});
    for (double p : uniform) CHECK(p == 0.25);

    const std::vector<double> extreme = softmax(std::vector<double>{1000.0, 0.0});
    CHECK(std::isfinite(extreme[0]));
    CHECK(std::isfinite(extreme[1]));
    CHECK(extreme[0] == Approx(1.0).epsilon(1e-12));
    CHECK(extreme[1] == Approx(0.0).epsilon(1e-12));

    // Hand computation: exp([ln 1, ln 3]) = [1, 3], normalized [0.25, 0.75].
    const std::vector<double> hand =
        softmax(std::vector<double>{std::log(1.0), std::log(3.0)});
    CHECK(hand[0] == Approx(0.25).epsilon(1e-12));
    CHECK(hand[1] == Approx(0.75).epsilon(1e-12));

    CHECK_THROWS_AS(
        softmax(std::vector<double>{1.0, std::numeric_limits<double>::infinity()}),
        std::invalid_argument);
    CHECK_THROWS_AS(softmax(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("softmax properties: normalization, positivity, shift invariance") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_below(7));
        const auto logits = random_logits(rng, k, -30.0, 30.0);
        const auto probs = softmax(logits);
        double sum = 0.0;
        for (double p : probs) {
            CHECK(p > 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        const double shift = rng.uniform(-50.0, 50.0);
        std::vector<double> shifted = logits;
        for (double& z : shifted) z += shift;
        const auto probs_shifted = softmax(shifted);
        for (int i = 0; i < k; ++i) {
            CHECK(probs_shifted[i] == Approx(probs[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("cross-entropy values and gradients") {
    const LossResult uniform = ce_loss(std::vector<double>{0.0, 0.0}, 0);
    CHECK(uniform.value == Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(uniform.grad_logits[0] == Approx(-0.5).epsilon(1e-15));
    CHECK(uniform.grad_logits[1] == Approx(0.5).epsilon(1e-15));

    // log-sum-exp route: -log p_y = log(1 + e^-10), no tiny-probability log.
    const LossResult confident = ce_loss(std::vector<double>{10.0, 0.0}, 0);
    CHECK(confident.value == Approx(std::log1p(std::exp(-10.0))).epsilon(1e-13));
    CHECK(confident.value == Approx(4.5399e-5).epsilon(1e-4));

    CHECK_THROWS_AS(ce_loss(std::vector<double>{0.0, 0.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(ce_loss(std::vector<double>{0.0, 0.0}, -1), std::invalid_argument);
}

TEST_CASE("gradients of shift-invariant losses sum to zero") {
    Rng rng(12);
    const auto severity = build_severity_matrix(four_class(), 5.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto logits = random_logits(rng, 4);
        const int y = static_cast<int>(rng.next_below(4));
        const std::vector<LossResult> results = {
            ce_loss(logits, y),
            wce_loss(logits, y, std::vector<double>{0.5, 1.5, 2.0, 0.25}),
            label_smoothing_loss(logits, y, 0.1),
            rcl_loss(logits, y, severity),
        };
        for (const auto& result : results) {
            CHECK(result.value >= 0.0);
            double sum = 0.0;
            for (double g : result.grad_logits) sum += g;
            CHECK(std::abs(sum) <= 1e-12);
        }
    }
}

TEST_CASE("weighted cross-entropy") {
    Rng rng(13);
    const auto logits = random_logits(rng, 4);
    const LossResult plain = ce_loss(logits, 2);
    const LossResult weighted =
        wce_loss(logits, 2, std::vector<double>{1.0, 1.0, 1.0, 1.0});
    CHECK(weighted.value == plain.value);
    CHECK(weighted.grad_logits == plain.grad_logits);

    const LossResult doubled =
        wce_loss(std::vector<double>{0.0, 0.0}, 0, std::vector<double>{2.0, 1.0});
    CHECK(doubled.value == Approx(2.0 * std::log(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(
        wce_loss(logits, 0, std::vector<double>{1.0, 0.0, 1.0, 1.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(wce_loss(logits, 0, std::vector<double>{1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("class weights from counts") {
    const std::vector<std::int64_t> balanced = {100, 100};
    CHECK(class_weights_from_counts(balanced) == std::vector<double>{1.0, 1.0});

    // 1/N normalized to mean one: [1/300, 1/100] -> [0.5, 1.5].
    const std::vector<std::int64_t> skewed = {300, 100};
    const auto weights = class_weights_from_counts(skewed);
    CHECK(weights[0] == Approx(0.5).epsilon(1e-15));
    CHECK(weights[1] == Approx(1.5).epsilon(1e-15));

    const std::vector<std::int64_t> quad = {1, 1, 1, 1};
    CHECK(class_weights_from_counts(quad) ==
          std::vector<double>{1.0, 1.0, 1.0, 1.0});

    const std::vector<std::int64_t> zero = {10, 0};
    CHECK_THROWS_AS(class_weights_from_counts(zero), std::invalid_argument);
}

TEST_CASE("focal loss values") {
    // gamma=0 collapses the modulating factor.
    Rng rng(14);
    const auto logits = random_logits(rng, 5);
    const int y = 3;
    const LossResult plain = ce_loss(logits, y);
    const LossResult collapsed = focal_loss(logits, y, 0.0, 1.0);
    CHECK(collapsed.value == plain.value);
    CHECK(collapsed.grad_logits == plain.grad_logits);

    // p_t = 0.5: value = (1-0.5)^2 * ln 2.
    const LossResult half = focal_loss(std::vector<double>{0.0, 0.0}, 0, 2.0, 1.0);
    CHECK(half.value == Approx(0.25 * std::log(2.0)).epsilon(1e-12));
    CHECK(half.value == Approx(0.173287).epsilon(1e-5));

    // Confident correct prediction: value -> 0.
    const LossResult confident =
        focal_loss(std::vector<double>{40.0, 0.0}, 0, 2.0, 1.0);
    CHECK(confident.value >= 0.0);
    CHECK(confident.value <= 1e-12);

    CHECK_THROWS_AS(focal_loss(logits, y, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(focal_loss(logits, y, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("label smoothing loss") {
    Rng rng(15);
    const auto logits = random_logits(rng, 6);
    const LossResult plain = ce_loss(logits, 1);
    const LossResult unsmoothed = label_smoothing_loss(logits, 1, 0.0);
    CHECK(unsmoothed.value == plain.value);
    CHECK(unsmoothed.grad_logits == plain.grad_logits);

    // Uniform prediction: CE against any target distribution is ln K.
    for (double epsilon : {0.05, 0.1, 0.3}) {
        const LossResult uniform =
            label_smoothing_loss(std::vector<double>{0.0, 0.0}, 0, epsilon);
        CHECK(uniform.value == Approx(std::log(2.0)).epsilon(1e-14));
    }

    // Recover the target from grad = softmax - q at uniform logits, K = 7.
    const std::vector<double> seven(7, 0.0);
    const LossResult smoothed = label_smoothing_loss(seven, 2, 0.1);
    const double q_y = 1.0 / 7.0 - smoothed.grad_logits[2];
    CHECK(q_y == Approx(0.9 + 0.1 / 7.0).epsilon(1e-14));
    CHECK(q_y == Approx(0.914286).epsilon(1e-6));
    const double q_other = 1.0 / 7.0 - smoothed.grad_logits[0];
    CHECK(q_other == Approx(0.1 / 7.0).epsilon(1e-12));

    CHECK_THROWS_AS(label_smoothing_loss(logits, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(label_smoothing_loss(logits, 1, -0.1), std::invalid_argument);
}

TEST_CASE("risk-calibrated loss scales cross-entropy by the severity entry") {
    const auto taxonomy = four_class();
    const auto ones = build_severity_matrix(taxonomy, 1.0, 1.0);
    const auto severity = build_severity_matrix(taxonomy, 5.0, 20.0);

    Rng rng(16);
    const auto logits = random_logits(rng, 4);
    const int y = 2;
    const LossResult plain = ce_loss(logits, y);
    const LossResult degenerate = rcl_loss(logits, y, ones);
    CHECK(degenerate.value == plain.value);
    CHECK(degenerate.grad_logits == plain.grad_logits);

    // Tie on flat logits resolves to class 0, a fatal prediction for y = 2.
    const std::vector<double> flat = {0.0, 0.0, 0.0, 0.0};
    const LossResult fatal = rcl_loss(flat, 2, severity);
    CHECK(fatal.value == Approx(20.0 * std::log(4.0)).epsilon(1e-13));
    CHECK(fatal.value == Approx(27.72589).epsilon(1e-6));

    // Confident correct prediction sits on the unit diagonal.
    const std::vector<double> peaked = {10.0, 0.0, 0.0, 0.0};
    const LossResult correct = rcl_loss(peaked, 0, severity);
    const LossResult correct_ce = ce_loss(peaked, 0);
    CHECK(correct.value == correct_ce.value);
    CHECK(correct.grad_logits == correct_ce.grad_logits);

    CHECK_THROWS_AS(rcl_loss(std::vector<double>{0.0, 0.0}, 0, severity),
                    std::invalid_argument);
}

TEST_CASE("rcl gradient anisotropy is exactly beta and alpha") {
    const auto severity = build_severity_matrix(four_class(), 5.0, 20.0);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        auto logits = random_logits(rng, 4);

        // Malignant truth predicted benign: every gradient component scales
        // by exactly beta.
        const int benign_pred = static_cast<int>(rng.next_below(2));
        logits[benign_pred] =
            *std::max_element(logits.begin(), logits.end()) + 1.0;
        const int y_malignant = 2 + static_cast<int>(rng.next_below(2));
        const LossResult rcl_fatal = rcl_loss(logits, y_malignant, severity);
        const LossResult ce_fatal = ce_loss(logits, y_malignant);
        for (int i = 0; i < 4; ++i) {
            CHECK(rcl_fatal.grad_logits[i] == 20.0 * ce_fatal.grad_logits[i]);
        }

        // Benign truth predicted malignant: alpha.
        auto logits2 = random_logits(rng, 4);
        const int malignant_pred = 2 + static_cast<int>(rng.next_below(2));
        logits2[malignant_pred] =
            *std::max_element(logits2.begin(), logits2.end()) + 1.0;
        const int y_benign = static_cast<int>(rng.next_below(2));
        const LossResult rcl_fp = rcl_loss(logits2, y_benign, severity);
        const LossResult ce_fp = ce_loss(logits2, y_benign);
        for (int i = 0; i < 4; ++i) {
            CHECK(rcl_fp.grad_logits[i] == 5.0 * ce_fp.grad_logits[i]);
        }
    }
}

TEST_CASE("loss values are shift invariant") {
    const auto severity = build_severity_matrix(four_class(), 5.0, 20.0);
    const std::vector<double> weights = {0.5, 1.5, 1.0, 1.0};
    Rng rng(18);
    for (int trial = 0; trial < 100; ++trial) {
        const auto logits = random_logits(rng, 4);
        const int y = static_cast<int>(rng.next_below(4));
        const double shift = rng.uniform(-20.0, 20.0);
        std::vector<double> shifted = logits;
        for (double& z : shifted) z += shift;

        CHECK(ce_loss(shifted, y).value ==
              Approx(ce_loss(logits, y).value).epsilon(1e-10));
        CHECK(wce_loss(shifted, y, weights).value ==
              Approx(wce_loss(logits, y, weights).value).epsilon(1e-10));
        CHECK(focal_loss(shifted, y, 2.0, 1.0).value ==
              Approx(focal_loss(logits, y, 2.0, 1.0).value).epsilon(1e-10));
        CHECK(label_smoothing_loss(shifted, y, 0.1).value ==
              Approx(label_smoothing_loss(logits, y, 0.1).value).epsilon(1e-10));
        CHECK(rcl_loss(shifted, y, severity).value ==
              Approx(rcl_loss(logits, y, severity).value).epsilon(1e-10));
        // The argmax, hence the multiplier, is unchanged by the shift.
        CHECK(argmax_lowest(shifted) == argmax_lowest(logits));
    }
}

TEST_CASE("equivalence identities against plain cross-entropy") {
    const auto taxonomy = four_class();
    const auto ones = build_severity_matrix(taxonomy, 1.0, 1.0);
    const std::vector<double> uniform_weights(4, 1.0);
    Rng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const auto logits = random_logits(rng, 4, -5.0, 5.0);
        const int y = static_cast<int>(rng.next_below(4));
        const LossResult reference = ce_loss(logits, y);

        for (const LossResult& other :
             {rcl_loss(logits, y, ones), focal_loss(logits, y, 0.0, 1.0),
              label_smoothing_loss(logits, y, 0.0),
              wce_loss(logits, y, uniform_weights)}) {
            CHECK(std::abs(other.value - reference.value) <= 1e-12);
            for (int i = 0; i < 4; ++i) {
                CHECK(std::abs(other.grad_logits[i] - reference.grad_logits[i]) <=
                      1e-12);
            }
        }
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    const auto severity = build_severity_matrix(four_class(), 5.0, 20.0);
    const std::vector<double> weights = {0.5, 1.5, 1.0, 2.0};
    Rng rng(20);
    const double h = 1e-5;
    for (int trial = 0; trial < 200; ++trial) {
        auto logits = random_logits(rng, 4);
        if (top_two_gap(logits) < 1e-2) continue;  // keep clear of the argmax edge
        const int y = static_cast<int>(rng.next_below(4));
        const double gamma = rng.uniform(0.2, 4.0);
        const double alpha_f = rng.uniform(0.5, 2.0);
        const double epsilon = rng.uniform(0.0, 0.5);

        const auto check = [&](const LossResult& analytic, auto&& value_fn) {
            const auto numeric = testsupport::central_differences(
                [&](const std::vector<double>& z) { return value_fn(z); }, logits, h);
            CHECK(testsupport::max_rel_error(analytic.grad_logits, numeric) < 1e-5);
        };

        check(ce_loss(logits, y),
              [&](const std::vector<double>& z) { return ce_loss(z, y).value; });
        check(wce_loss(logits, y, weights), [&](const std::vector<double>& z) {
            return wce_loss(z, y, weights).value;
        });
        check(focal_loss(logits, y, gamma, alpha_f),
              [&](const std::vector<double>& z) {
                  return focal_loss(z, y, gamma, alpha_f).value;
              });
        check(label_smoothing_loss(logits, y, epsilon),
              [&](const std::vector<double>& z) {
                  return label_smoothing_loss(z, y, epsilon).value;
              });
        check(rcl_loss(logits, y, severity), [&](const std::vector<double>& z) {
            return rcl_loss(z, y, severity).value;
        });
    }
}

TEST_CASE("batch loss is the sample mean") {
    const auto severity = build_severity_matrix(four_class(), 5.0, 20.0);
    LossSpec spec;
    spec.kind = LossKind::RCL;
    spec.severity = severity;

    const std::vector<double> fatal_logits = {3.0, 0.0, 0.0, 0.0};

    // Single-sample batch matches the single-sample op.
    const BatchLossResult single =
        batch_loss(spec, {fatal_logits}, std::vector<int>{2});
    const LossResult direct = rcl_loss(fatal_logits, 2, severity);
    CHECK(single.value == direct.value);
    CHECK(single.grad_logits[0] == direct.grad_logits);

    // Two identical samples keep the mean unchanged.
    const BatchLossResult doubled =
        batch_loss(spec, {fatal_logits, fatal_logits}, std::vector<int>{2, 2});
    CHECK(doubled.value == Approx(direct.value).epsilon(1e-15));

    // One fatal (multiplier beta) plus one correct (multiplier 1) sample.
    const BatchLossResult mixed =
        batch_loss(spec, {fatal_logits, fatal_logits}, std::vector<int>{2, 0});
    const double expected = (20.0 * ce_loss(fatal_logits, 2).value +
                             ce_loss(fatal_logits, 0).value) /
                            2.0;
    CHECK(mixed.value == Approx(expected).epsilon(1e-13));

    CHECK_THROWS_AS(batch_loss(spec, {}, std::vector<int>{}), std::invalid_argument);
    CHECK_THROWS_AS(batch_loss(spec, {fatal_logits}, std::vector<int>{0, 1}),
                    std::invalid_argument);
}

TEST_CASE("loss resolution from serializable configs") {
    const auto taxonomy = four_class();
    const std::vector<std::int64_t> counts = {300, 100, 50, 50};

    LossConfig wce;
    wce.kind = LossKind::WCE;
    wce.weights_mode = WeightsMode::Uniform;
    CHECK(resolve_loss(wce, taxonomy, counts).class_weights ==
          std::vector<double>(4, 1.0));
    wce.weights_mode = WeightsMode::InverseFrequency;
    CHECK(resolve_loss(wce, taxonomy, counts).class_weights ==
          class_weights_from_counts(counts));

    LossConfig rcl;
    rcl.kind = LossKind::RCL;
    rcl.alpha = 5.0;
    rcl.beta = 20.0;
    const LossSpec resolved = resolve_loss(rcl, taxonomy, counts);
    CHECK(resolved.severity.k == 4);
    CHECK(resolved.severity.at(2, 0) == 20.0);

    rcl.beta = 2.0;  // beta < alpha
    CHECK_THROWS_AS(resolve_loss(rcl, taxonomy, counts), std::invalid_argument);

    CHECK(loss_kind_from_string("LabelSmoothing") == LossKind::LabelSmoothing);
    CHECK(loss_kind_from_string("rcl") == LossKind::RCL);
    CHECK_THROWS_AS(loss_kind_from_string("mse"), std::invalid_argument);
}

TEST_CASE("argmax tie-break picks the lowest index") {
    CHECK(argmax_lowest(std::vector<double>{0.0, 0.0, 0.0}) == 0);
    CHECK(argmax_lowest(std::vector<double>{1.0, 2.0, 2.0}) == 1);
    CHECK(argmax_lowest(std::vector<double>{-1.0, -3.0}) == 0);
}
