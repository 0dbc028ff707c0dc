#pragma once

#include <array>
#include <cstdint>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lungsound/common.hpp"
#include "lungsound/dataset.hpp"
#include "lungsound/model.hpp"

namespace lungsound::eval {

// Reports use the axis order Normal, Wheezes, Crackles, Both; the internal
// enum encoding stays Normal, Crackles, Wheezes, Both.
inline constexpr std::array<ClassLabel, kNumClasses> kReportAxis = {
    ClassLabel::normal, ClassLabel::wheezes, ClassLabel::crackles, ClassLabel::both};

inline constexpr std::size_t report_index(ClassLabel c) {
    switch (c) {
        case ClassLabel::normal: return 0;
        case ClassLabel::wheezes: return 1;
        case ClassLabel::crackles: return 2;
        case ClassLabel::both: return 3;
    }
    return 0;
}

// rows = true class, columns = predicted class, both in report axis order.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& row : counts)
            for (auto v : row) t += v;
        return t;
    }

    std::uint64_t trace() const {
        std::uint64_t t = 0;
        for (std::size_t i = 0; i < kNumClasses; ++i) t += counts[i][i];
        return t;
    }

    std::uint64_t row_sum(std::size_t r) const {
        std::uint64_t t = 0;
        for (auto v : counts[r]) t += v;
        return t;
    }

    std::uint64_t col_sum(std::size_t c) const {
        std::uint64_t t = 0;
        for (const auto& row : counts) t += row[c];
        return t;
    }

    void add(ClassLabel truth, ClassLabel predicted) {
        ++counts[report_index(truth)][report_index(predicted)];
    }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        for (std::size_t i = 0; i < kNumClasses; ++i)
            for (std::size_t j = 0; j < kNumClasses; ++j) counts[i][j] += o.counts[i][j];
        return *this;
    }
};

inline ConfusionMatrix confusion_matrix(
    const std::vector<std::pair<ClassLabel, ClassLabel>>& pairs) {
    ConfusionMatrix cm;
    for (const auto& [truth, pred] : pairs) cm.add(truth, pred);
    return cm;
}

struct BinaryCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

inline BinaryCounts one_vs_rest(const ConfusionMatrix& cm, ClassLabel c) {
    const std::size_t i = report_index(c);
    BinaryCounts b;
    b.tp = cm.counts[i][i];
    b.fn = cm.row_sum(i) - b.tp;
    b.fp = cm.col_sum(i) - b.tp;
    b.tn = cm.total() - b.tp - b.fn - b.fp;
    return b;
}

// A 0/0 rate is defined as 0; the flag lets reports carry a warning instead
// of crashing on empty classes.
struct Rate {
    double value = 0.0;
    bool degenerate = false;
};

inline Rate safe_div(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return {0.0, true};
    return {static_cast<double>(num) / static_cast<double>(den), false};
}

inline Rate sensitivity(const BinaryCounts& b) { return safe_div(b.tp, b.tp + b.fn); }
inline Rate specificity(const BinaryCounts& b) { return safe_div(b.tn, b.tn + b.fp); }
inline Rate false_alarm(const BinaryCounts& b) {
    auto s = specificity(b);
    return {1.0 - s.value, s.degenerate};
}
inline Rate precision(const BinaryCounts& b) { return safe_div(b.tp, b.tp + b.fp); }
// The printed form of the precision equation coincides with sensitivity;
// it is exposed under its conventional name.
inline Rate recall(const BinaryCounts& b) { return sensitivity(b); }

inline Rate f1(const BinaryCounts& b) {
    const auto p = precision(b);
    const auto r = recall(b);
    if (p.value + r.value == 0.0) return {0.0, true};
    return {2.0 * p.value * r.value / (p.value + r.value), p.degenerate || r.degenerate};
}

inline Rate accuracy(const ConfusionMatrix& cm) { return safe_div(cm.trace(), cm.total()); }

inline double icbhi_score(double sens, double spec) { return (sens + spec) / 2.0; }

struct ClassRates {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double false_alarm_rate = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double icbhi_score = 0.0;
    double accuracy = 0.0;  // one-vs-rest (tp + tn) / total
    bool degenerate = false;
};

inline ClassRates class_rates(const ConfusionMatrix& cm, ClassLabel c) {
    const auto b = one_vs_rest(cm, c);
    ClassRates r;
    const auto sens = sensitivity(b);
    const auto spec = specificity(b);
    const auto prec = precision(b);
    const auto f = f1(b);
    const auto acc = safe_div(b.tp + b.tn, b.total());
    r.sensitivity = sens.value;
    r.specificity = spec.value;
    r.false_alarm_rate = false_alarm(b).value;
    r.precision = prec.value;
    r.recall = recall(b).value;
    r.f1 = f.value;
    r.icbhi_score = icbhi_score(sens.value, spec.value);
    r.accuracy = acc.value;
    r.degenerate = sens.degenerate || spec.degenerate || prec.degenerate || f.degenerate;
    return r;
}

struct FoldAssignment {
    std::map<int, int> fold_of_patient;
    int k = 0;
    std::uint64_t seed = 0;

    int fold(int patient_id) const {
        auto it = fold_of_patient.find(patient_id);
        if (it == fold_of_patient.end())
            throw std::logic_error("fold assignment: unknown patient " +
                                   std::to_string(patient_id));
        return it->second;
    }
};

namespace detail {

// patient -> cycle count, in deterministic (sorted) patient order.
template <typename Cycles>
std::map<int, std::size_t> patient_cycle_counts(const Cycles& cycles) {
    std::map<int, std::size_t> counts;
    for (const auto& c : cycles) ++counts[c.patient_id];
    return counts;
}

}  // namespace detail

// Patients are shuffled by seed, then assigned greedily to the fold with the
// smallest current cycle count, so folds balance even when patients differ
// in cycle count. No patient ever lands in two folds.
template <typename Cycles>
FoldAssignment make_patient_folds(const Cycles& cycles, int k, std::uint64_t seed) {
    if (k < 2) throw data_error("make_patient_folds: k must be >= 2");
    const auto counts = detail::patient_cycle_counts(cycles);
    if (counts.size() < static_cast<std::size_t>(k))
        throw data_error("make_patient_folds: " + std::to_string(counts.size()) +
                         " patients cannot fill " + std::to_string(k) + " folds");

    std::vector<int> patients;
    patients.reserve(counts.size());
    for (const auto& [pid, n] : counts) patients.push_back(pid);
    Rng rng(seed);
    rng.shuffle(patients);

    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    std::vector<std::size_t> load(static_cast<std::size_t>(k), 0);
    for (int pid : patients) {
        std::size_t target = 0;
        for (std::size_t f = 1; f < load.size(); ++f)
            if (load[f] < load[target]) target = f;
        fa.fold_of_patient[pid] = static_cast<int>(target);
        load[target] += counts.at(pid);
    }
    return fa;
}

struct Split {
    std::set<int> train_patients;
    std::set<int> validation_patients;
    std::set<int> test_patients;
};

// Patient-level 80/20 split with 20% of the training patients held out for
// validation, balanced by cycle count.
template <typename Cycles>
Split split_80_20(const Cycles& cycles, std::uint64_t seed) {
    const auto counts = detail::patient_cycle_counts(cycles);
    if (counts.size() < 5)
        throw data_error("split_80_20: need at least 5 patients, got " +
                         std::to_string(counts.size()));

    std::vector<int> patients;
    std::size_t total = 0;
    for (const auto& [pid, n] : counts) {
        patients.push_back(pid);
        total += n;
    }
    Rng rng(seed);
    rng.shuffle(patients);

    Split split;
    const auto test_target =
        static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(total)));
    std::size_t acc = 0;
    std::size_t i = 0;
    while (i < patients.size() && acc < test_target && patients.size() - i > 2) {
        split.test_patients.insert(patients[i]);
        acc += counts.at(patients[i]);
        ++i;
    }
    if (split.test_patients.empty()) {
        split.test_patients.insert(patients[i]);
        acc += counts.at(patients[i]);
        ++i;
    }

    const std::size_t train_total = total - acc;
    const auto val_target =
        static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(train_total)));
    std::size_t val_acc = 0;
    while (i < patients.size() && val_acc < val_target && patients.size() - i > 1) {
        split.validation_patients.insert(patients[i]);
        val_acc += counts.at(patients[i]);
        ++i;
    }
    if (split.validation_patients.empty()) {
        split.validation_patients.insert(patients[i]);
        ++i;
    }
    for (; i < patients.size(); ++i) split.train_patients.insert(patients[i]);
    if (split.train_patients.empty())
        throw data_error("split_80_20: no patients left for training");
    return split;
}

// One cycle ready for head training: identity, patient, label, extracted
// feature vector.
struct Sample {
    int patient_id = 0;
    ClassLabel label = ClassLabel::normal;
    std::vector<double> features;
};

struct FoldResult {
    int fold = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double accuracy = 0.0;
    ConfusionMatrix cm;
    double final_train_loss = 0.0;
};

struct MetricsReport {
    int k = 0;
    ConfusionMatrix pooled;
    std::array<ClassRates, kNumClasses> per_class{};  // report axis order
    double overall_accuracy = 0.0;
    ClassRates macro;
    double fold_mean_accuracy = 0.0;
    std::vector<FoldResult> folds;
    std::vector<std::string> warnings;
};

namespace detail {

inline void finalize_report(MetricsReport& report) {
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        const ClassLabel c = kReportAxis[i];
        report.per_class[i] = class_rates(report.pooled, c);
        if (report.per_class[i].degenerate)
            report.warnings.push_back(std::string("class ") + class_name(c) +
                                      ": degenerate denominator, 0/0 rates reported as 0");
    }
    const auto acc = accuracy(report.pooled);
    report.overall_accuracy = acc.value;
    if (acc.degenerate) report.warnings.push_back("overall accuracy over an empty matrix");

    ClassRates macro{};
    for (const auto& r : report.per_class) {
        macro.sensitivity += r.sensitivity / kNumClasses;
        macro.specificity += r.specificity / kNumClasses;
        macro.false_alarm_rate += r.false_alarm_rate / kNumClasses;
        macro.precision += r.precision / kNumClasses;
        macro.recall += r.recall / kNumClasses;
        macro.f1 += r.f1 / kNumClasses;
        macro.icbhi_score += r.icbhi_score / kNumClasses;
        macro.accuracy += r.accuracy / kNumClasses;
        macro.degenerate = macro.degenerate || r.degenerate;
    }
    report.macro = macro;

    if (!report.folds.empty()) {
        double sum = 0.0;
        for (const auto& f : report.folds) sum += f.accuracy;
        report.fold_mean_accuracy = sum / static_cast<double>(report.folds.size());
    }
}

}  // namespace detail

// Builds a report from already-scored (true, predicted) pairs. Used both by
// cross_validate and for scoring an externally produced confusion matrix.
inline MetricsReport report_from_matrix(const ConfusionMatrix& cm) {
    MetricsReport report;
    report.k = 0;
    report.pooled = cm;
    detail::finalize_report(report);
    return report;
}

// k-fold cross-validation over precomputed features: for each fold, trains a
// fresh head on the other folds and scores this one. Pools every scored pair
// into one matrix and also reports per-fold accuracy plus its mean.
inline MetricsReport cross_validate(const std::vector<Sample>& samples, int k,
                                    const model::TrainConfig& train_cfg, std::uint64_t seed) {
    if (samples.empty()) throw data_error("cross_validate: no samples");
    const auto folds = make_patient_folds(samples, k, seed);

    MetricsReport report;
    report.k = k;
    for (int fold = 0; fold < k; ++fold) {
        std::vector<std::vector<double>> train_x;
        std::vector<ClassLabel> train_y;
        std::vector<const Sample*> test;
        for (const auto& s : samples) {
            if (folds.fold(s.patient_id) == fold) {
                test.push_back(&s);
            } else {
                train_x.push_back(s.features);
                train_y.push_back(s.label);
            }
        }
        if (train_x.empty() || test.empty()) {
            report.warnings.push_back("fold " + std::to_string(fold) +
                                      ": empty train or test side");
            continue;
        }
        auto cfg = train_cfg;
        cfg.seed = train_cfg.seed + static_cast<std::uint64_t>(fold);
        const auto trained = model::train_head(train_x, train_y, cfg);

        FoldResult fr;
        fr.fold = fold;
        fr.n_train = train_x.size();
        fr.n_test = test.size();
        fr.final_train_loss =
            trained.epoch_mean_loss.empty() ? 0.0 : trained.epoch_mean_loss.back();
        std::uint64_t correct = 0;
        for (const Sample* s : test) {
            const auto pred = model::classify_features(s->features, trained.head);
            fr.cm.add(s->label, pred.label);
            if (pred.label == s->label) ++correct;
        }
        fr.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
        report.pooled += fr.cm;
        report.folds.push_back(std::move(fr));
    }
    detail::finalize_report(report);
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json rates_to_json(const ClassRates& r) {
    return {{"sensitivity", r.sensitivity},
            {"specificity", r.specificity},
            {"false_alarm_rate", r.false_alarm_rate},
            {"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"icbhi_score", r.icbhi_score},
            {"accuracy", r.accuracy}};
}

inline nlohmann::json to_json(const MetricsReport& report) {
    nlohmann::json j;
    auto cm = nlohmann::json::array();
    for (const auto& row : report.pooled.counts) {
        auto jr = nlohmann::json::array();
        for (auto v : row) jr.push_back(v);
        cm.push_back(jr);
    }
    j["confusion_matrix"] = cm;
    j["axis_order"] = nlohmann::json::array();
    for (auto c : kReportAxis) j["axis_order"].push_back(class_name(c));
    nlohmann::json per_class;
    for (std::size_t i = 0; i < kNumClasses; ++i)
        per_class[class_name(kReportAxis[i])] = rates_to_json(report.per_class[i]);
    j["per_class"] = per_class;
    j["overall_accuracy"] = report.overall_accuracy;
    j["macro"] = rates_to_json(report.macro);
    j["fold_mean_accuracy"] = report.fold_mean_accuracy;
    auto folds = nlohmann::json::array();
    for (const auto& f : report.folds) {
        folds.push_back({{"fold", f.fold},
                         {"n_train", f.n_train},
                         {"n_test", f.n_test},
                         {"accuracy", f.accuracy},
                         {"final_train_loss", f.final_train_loss}});
    }
    j["folds"] = folds;
    j["k"] = report.k;
    j["warnings"] = report.warnings;
    return j;
}

// Plain-text table with the per-class Accuracy / Precision / Recall / F1
// columns, then the aggregate lines.
inline std::string to_text(const MetricsReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << std::left << std::setw(10) << "Class" << std::right << std::setw(10) << "Accuracy"
        << std::setw(11) << "Precision" << std::setw(8) << "Recall" << std::setw(10) << "F1 Score"
        << "\n";
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        const auto& r = report.per_class[i];
        out << std::left << std::setw(10) << class_name(kReportAxis[i]) << std::right
            << std::setw(10) << r.accuracy << std::setw(11) << r.precision << std::setw(8)
            << r.recall << std::setw(10) << r.f1 << "\n";
    }
    out << "\n";
    out << "Overall accuracy (pooled): " << report.overall_accuracy << "\n";
    if (!report.folds.empty())
        out << "Mean of " << report.folds.size()
            << " fold accuracies:   " << report.fold_mean_accuracy << "\n";
    out << "Macro ICBHI score:         " << report.macro.icbhi_score << "\n";
    out << "\nConfusion matrix (rows = truth):\n";
    out << std::left << std::setw(10) << "";
    for (auto c : kReportAxis) out << std::right << std::setw(9) << class_name(c);
    out << "\n";
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        out << std::left << std::setw(10) << class_name(kReportAxis[i]);
        for (auto v : report.pooled.counts[i]) out << std::right << std::setw(9) << v;
        out << "\n";
    }
    if (!report.warnings.empty()) {
        out << "\nWarnings:\n";
        for (const auto& w : report.warnings) out << "  - " << w << "\n";
    }
    return out.str();
}

}  // namespace lungsound::eval
