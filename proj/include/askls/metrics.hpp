#pragma once

#include "askls/common.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace askls {

struct ClassCounts {
    int label = 0;
    long tp = 0;
    long fp = 0;
    long fn = 0;

    double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp); }
    double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn); }
    // 0 when there are neither predicted nor true positives.
    double f1() const {
        const double denom = double(2 * tp + fp + fn);
        return denom == 0.0 ? 0.0 : 2.0 * double(tp) / denom;
    }
};

struct F1Scores {
    double micro = 0.0;
    double macro = 0.0;
};

inline std::vector<ClassCounts> confusion_counts(const std::vector<int>& pred,
                                                 const std::vector<int>& truth,
                                                 const std::vector<int>& class_list) {
    if (pred.size() != truth.size()) throw DimensionError("predictions and truth differ in length");
    if (pred.empty()) throw DataError("cannot score an empty label vector");
    std::vector<ClassCounts> counts;
    counts.reserve(class_list.size());
    for (int c : class_list) {
        ClassCounts cc;
        cc.label = c;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred[i] == c && truth[i] == c) ++cc.tp;
            else if (pred[i] == c && truth[i] != c) ++cc.fp;
            else if (pred[i] != c && truth[i] == c) ++cc.fn;
        }
        counts.push_back(cc);
    }
    return counts;
}

// Micro-F1 pools TP/FP/FN over the class list; macro-F1 is the unweighted
// mean of per-class F1 (absent classes contribute 0).
inline F1Scores micro_macro_f1(const std::vector<int>& pred, const std::vector<int>& truth,
                               const std::vector<int>& class_list) {
    const auto counts = confusion_counts(pred, truth, class_list);
    long tp = 0, fp = 0, fn = 0;
    double macro_sum = 0.0;
    for (const auto& cc : counts) {
        tp += cc.tp;
        fp += cc.fp;
        fn += cc.fn;
        macro_sum += cc.f1();
    }
    F1Scores f;
    const double denom = double(2 * tp + fp + fn);
    f.micro = denom == 0.0 ? 0.0 : 2.0 * double(tp) / denom;
    f.macro = class_list.empty() ? 0.0 : macro_sum / double(class_list.size());
    return f;
}

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) throw DimensionError("predictions and truth differ in length");
    if (pred.empty()) throw DataError("cannot score an empty label vector");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
    return double(hits) / double(pred.size());
}

struct TrialMetrics {
    double accuracy = 0.0;
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassCounts> per_class;
};

inline TrialMetrics evaluate_predictions(const std::vector<int>& pred, const std::vector<int>& truth,
                                         const std::vector<int>& class_list) {
    TrialMetrics t;
    t.per_class = confusion_counts(pred, truth, class_list);
    const F1Scores f = micro_macro_f1(pred, truth, class_list);
    t.micro_f1 = f.micro;
    t.macro_f1 = f.macro;
    t.accuracy = accuracy(pred, truth);
    return t;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    if (xs.empty()) return ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= double(xs.size());
    for (double x : xs) ms.std += (x - ms.mean) * (x - ms.mean);
    ms.std = std::sqrt(ms.std / double(xs.size()));
    return ms;
}

// Trial-aggregated evaluation for the paper-style mean+/-std tables.
struct EvalReport {
    std::vector<std::string> methods;               // column per method
    std::map<std::string, std::vector<TrialMetrics>> trials;

    void add(const std::string& method, TrialMetrics t) {
        if (trials.find(method) == trials.end()) methods.push_back(method);
        trials[method].push_back(std::move(t));
    }

    MeanStd stat(const std::string& method, const char* which) const {
        std::vector<double> xs;
        for (const auto& t : trials.at(method)) {
            if (std::string(which) == "accuracy") xs.push_back(t.accuracy);
            else if (std::string(which) == "micro_f1") xs.push_back(t.micro_f1);
            else xs.push_back(t.macro_f1);
        }
        return mean_std(xs);
    }

    void write_csv(std::ostream& os) const {
        os << "method,metric,mean,std\n";
        os << std::setprecision(6) << std::fixed;
        for (const auto& m : methods) {
            for (const char* which : {"accuracy", "micro_f1", "macro_f1"}) {
                const MeanStd ms = stat(m, which);
                os << m << ',' << which << ',' << ms.mean << ',' << ms.std << '\n';
            }
        }
    }

    void write_table(std::ostream& os) const {
        auto cell = [](const MeanStd& ms) {
            std::ostringstream ss;
            ss << std::fixed << std::setprecision(3) << ms.mean << "±" << ms.std;
            return ss.str();
        };
        os << std::left << std::setw(18) << "method" << std::setw(16) << "accuracy"
           << std::setw(16) << "micro-F1" << std::setw(16) << "macro-F1" << '\n';
        for (const auto& m : methods) {
            os << std::left << std::setw(18) << m << std::setw(16) << cell(stat(m, "accuracy"))
               << std::setw(16) << cell(stat(m, "micro_f1")) << std::setw(16)
               << cell(stat(m, "macro_f1")) << '\n';
        }
    }
};

}  // namespace askls
