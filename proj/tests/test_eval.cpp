#include <gtest/gtest.h>

#include <set>

#include "lungsound/eval.hpp"
#include "lungsound/synth.hpp"

using namespace lungsound;

namespace {

// Published four-class confusion matrix used as a metrics oracle
// (rows/columns: Normal, Wheezes, Crackles, Both).
eval::ConfusionMatrix reference_matrix() {
    eval::ConfusionMatrix cm;
    cm.counts = {{{706, 5, 5, 4}, {5, 163, 9, 4}, {10, 6, 356, 7}, {6, 3, 5, 86}}};
    return cm;
}

std::vector<LabeledCycle> synthetic_patients(int n_patients, int cycles_per_patient) {
    std::vector<LabeledCycle> cycles;
    Rng rng(100);
    for (int p = 0; p < n_patients; ++p)
        for (int c = 0; c < cycles_per_patient; ++c) {
            LabeledCycle lc;
            lc.patient_id = p;
            lc.label = static_cast<ClassLabel>(rng.below(4));
            cycles.push_back(lc);
        }
    return cycles;
}

}  // namespace

TEST(ConfusionMatrix, BuildAndTotals) {
    EXPECT_EQ(eval::confusion_matrix({}).total(), 0u);

    std::vector<std::pair<ClassLabel, ClassLabel>> pairs = {
        {ClassLabel::normal, ClassLabel::normal},
        {ClassLabel::both, ClassLabel::both},
        {ClassLabel::wheezes, ClassLabel::wheezes}};
    const auto diag = eval::confusion_matrix(pairs);
    EXPECT_EQ(diag.trace(), 3u);
    EXPECT_EQ(diag.total(), 3u);

    const auto ref = reference_matrix();
    EXPECT_EQ(ref.total(), 1380u);
    EXPECT_EQ(ref.trace(), 1311u);
}

TEST(ConfusionMatrix, AxisOrderIsReportOrder) {
    // one crackles-as-wheezes mistake lands in row 2, column 1
    const auto cm = eval::confusion_matrix({{ClassLabel::crackles, ClassLabel::wheezes}});
    EXPECT_EQ(cm.counts[2][1], 1u);
}

TEST(OneVsRest, ReferenceCountsAndZero) {
    const auto ref = reference_matrix();
    const auto normal = eval::one_vs_rest(ref, ClassLabel::normal);
    EXPECT_EQ(normal.tp, 706u);
    EXPECT_EQ(normal.fn, 14u);
    EXPECT_EQ(normal.fp, 21u);
    EXPECT_EQ(normal.tn, 639u);

    const auto wheezes = eval::one_vs_rest(ref, ClassLabel::wheezes);
    EXPECT_EQ(wheezes.tp, 163u);
    EXPECT_EQ(wheezes.fn, 18u);
    EXPECT_EQ(wheezes.fp, 14u);
    EXPECT_EQ(wheezes.tn, 1185u);

    const auto zero = eval::one_vs_rest(eval::ConfusionMatrix{}, ClassLabel::both);
    EXPECT_EQ(zero.tp + zero.fp + zero.tn + zero.fn, 0u);

    // tp sums over classes equal the trace; tp + fn is the row sum
    std::uint64_t tp_sum = 0;
    for (auto c : eval::kReportAxis) {
        const auto b = eval::one_vs_rest(ref, c);
        tp_sum += b.tp;
        EXPECT_EQ(b.tp + b.fn, ref.row_sum(eval::report_index(c)));
        EXPECT_EQ(b.total(), ref.total());
    }
    EXPECT_EQ(tp_sum, ref.trace());
}

TEST(Metrics, FormulasOnReferenceMatrix) {
    const auto ref = reference_matrix();
    EXPECT_NEAR(eval::accuracy(ref).value, 1311.0 / 1380.0, 1e-12);
    EXPECT_NEAR(eval::accuracy(ref).value, 0.9500, 1e-9);

    const auto b = eval::one_vs_rest(ref, ClassLabel::normal);
    EXPECT_NEAR(eval::sensitivity(b).value, 0.9806, 5e-5);
    EXPECT_NEAR(eval::specificity(b).value, 0.9682, 5e-5);
    EXPECT_NEAR(eval::precision(b).value, 0.9711, 5e-5);
    EXPECT_NEAR(eval::icbhi_score(eval::sensitivity(b).value, eval::specificity(b).value),
                0.9744, 5e-5);
    EXPECT_NEAR(eval::false_alarm(b).value, 1.0 - eval::specificity(b).value, 1e-15);
    // recall is the printed form of the precision equation: same as sensitivity
    EXPECT_EQ(eval::recall(b).value, eval::sensitivity(b).value);
}

TEST(Metrics, IcbhiSymmetryAndDegenerate) {
    EXPECT_DOUBLE_EQ(eval::icbhi_score(0.8, 0.9), 0.85);
    EXPECT_DOUBLE_EQ(eval::icbhi_score(0.9, 0.8), 0.85);
    EXPECT_DOUBLE_EQ(eval::icbhi_score(0.7, 0.7), 0.7);

    eval::BinaryCounts empty;
    const auto s = eval::sensitivity(empty);
    EXPECT_EQ(s.value, 0.0);
    EXPECT_TRUE(s.degenerate);
    const auto f = eval::f1(empty);
    EXPECT_EQ(f.value, 0.0);
    EXPECT_TRUE(f.degenerate);

    const auto report = eval::report_from_matrix(eval::ConfusionMatrix{});
    EXPECT_FALSE(report.warnings.empty());
}

TEST(Metrics, AccuracyOneIffDiagonal) {
    eval::ConfusionMatrix diag;
    diag.counts[0][0] = 3;
    diag.counts[2][2] = 9;
    EXPECT_DOUBLE_EQ(eval::accuracy(diag).value, 1.0);
    diag.counts[1][3] = 1;
    EXPECT_LT(eval::accuracy(diag).value, 1.0);
}

TEST(PatientFolds, BalanceDisjointDeterminism) {
    const auto cycles = synthetic_patients(10, 3);
    const auto fa = eval::make_patient_folds(cycles, 5, 1234);
    EXPECT_EQ(fa.k, 5);
    std::array<int, 5> patients_per_fold{};
    for (const auto& [pid, fold] : fa.fold_of_patient) ++patients_per_fold[static_cast<std::size_t>(fold)];
    for (int n : patients_per_fold) EXPECT_EQ(n, 2);

    const auto fa2 = eval::make_patient_folds(cycles, 5, 1234);
    EXPECT_EQ(fa.fold_of_patient, fa2.fold_of_patient);

    EXPECT_THROW(eval::make_patient_folds(synthetic_patients(3, 2), 5, 0), data_error);
}

TEST(PatientFolds, PartitionFuzz) {
    const auto cycles = synthetic_patients(23, 4);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto fa = eval::make_patient_folds(cycles, 5, seed);
        EXPECT_EQ(fa.fold_of_patient.size(), 23u);
        for (const auto& [pid, fold] : fa.fold_of_patient) {
            EXPECT_GE(fold, 0);
            EXPECT_LT(fold, 5);
        }
        // each fold non-empty
        std::set<int> used;
        for (const auto& [pid, fold] : fa.fold_of_patient) used.insert(fold);
        EXPECT_EQ(used.size(), 5u);
    }
}

TEST(Split8020, QuotedFractionsAndDisjointness) {
    const auto cycles = synthetic_patients(100, 5);
    const auto split = eval::split_80_20(cycles, 7);
    EXPECT_EQ(split.test_patients.size(), 20u);
    EXPECT_EQ(split.validation_patients.size(), 16u);
    EXPECT_EQ(split.train_patients.size(), 64u);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = eval::split_80_20(cycles, seed);
        for (int p : s.test_patients) {
            EXPECT_FALSE(s.train_patients.count(p));
            EXPECT_FALSE(s.validation_patients.count(p));
        }
        for (int p : s.validation_patients) EXPECT_FALSE(s.train_patients.count(p));
        EXPECT_EQ(s.test_patients.size() + s.validation_patients.size() +
                      s.train_patients.size(),
                  100u);
    }

    const auto again = eval::split_80_20(cycles, 7);
    EXPECT_EQ(split.test_patients, again.test_patients);
    EXPECT_EQ(split.validation_patients, again.validation_patients);

    EXPECT_THROW(eval::split_80_20(synthetic_patients(4, 2), 0), data_error);
}

namespace {

// features that identify the label up to mild noise, for CV plumbing tests
std::vector<eval::Sample> easy_samples(int n_patients, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<eval::Sample> samples;
    for (int p = 0; p < n_patients; ++p)
        for (int li = 0; li < 4; ++li) {
            eval::Sample s;
            s.patient_id = p;
            s.label = static_cast<ClassLabel>(li);
            s.features.assign(8, 0.0);
            s.features[static_cast<std::size_t>(li)] = 2.0 + rng.uniform(-0.2, 0.2);
            s.features[4 + static_cast<std::size_t>(li)] = rng.uniform(-0.1, 0.1);
            samples.push_back(std::move(s));
        }
    return samples;
}

}  // namespace

TEST(CrossValidate, BookkeepingAndDeterminism) {
    const auto samples = easy_samples(20, 3);
    model::TrainConfig cfg;
    cfg.seed = 11;
    const auto report = eval::cross_validate(samples, 5, cfg, 321);
    EXPECT_EQ(report.folds.size(), 5u);
    EXPECT_EQ(report.pooled.total(), samples.size());  // every cycle scored exactly once
    std::size_t scored = 0;
    for (const auto& f : report.folds) scored += f.n_test;
    EXPECT_EQ(scored, samples.size());
    EXPECT_GT(report.fold_mean_accuracy, 0.9);  // separable by construction

    const auto again = eval::cross_validate(samples, 5, cfg, 321);
    EXPECT_EQ(eval::to_json(report).dump(), eval::to_json(again).dump());
}

TEST(CrossValidate, SerializationShape) {
    const auto samples = easy_samples(10, 4);
    model::TrainConfig cfg;
    cfg.seed = 2;
    cfg.epochs = 5;
    const auto report = eval::cross_validate(samples, 5, cfg, 9);
    const auto j = eval::to_json(report);
    EXPECT_EQ(j.at("confusion_matrix").size(), 4u);
    EXPECT_EQ(j.at("confusion_matrix").at(0).size(), 4u);
    EXPECT_TRUE(j.contains("per_class"));
    EXPECT_TRUE(j.at("per_class").contains("Normal"));
    EXPECT_TRUE(j.at("per_class").at("Normal").contains("sensitivity"));
    EXPECT_TRUE(j.contains("overall_accuracy"));
    EXPECT_TRUE(j.contains("macro"));
    EXPECT_TRUE(j.contains("folds"));
    EXPECT_TRUE(j.contains("warnings"));
    EXPECT_EQ(j.at("folds").size(), 5u);

    const auto text = eval::to_text(report);
    EXPECT_NE(text.find("Class"), std::string::npos);
    EXPECT_NE(text.find("Precision"), std::string::npos);
    EXPECT_NE(text.find("Wheezes"), std::string::npos);
    EXPECT_NE(text.find("F1 Score"), std::string::npos);
}
