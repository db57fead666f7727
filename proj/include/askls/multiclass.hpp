#pragma once

#include "askls/common.hpp"
#include "askls/metrics.hpp"
#include "askls/model.hpp"

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

namespace askls {

inline std::vector<int> distinct_classes(const std::vector<int>& labels) {
    std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

// One binary model per class (positive = class, negative = rest), all
// trained on the same sample set.
template <class Model>
struct OneVsRest {
    std::vector<int> classes;  // sorted ascending
    std::vector<Model> models;
};

// `fit_binary(samples, y)` -> Model, with y in {+1,-1}.
template <class Model, class Fitter>
OneVsRest<Model> fit_one_vs_rest(const SampleSet& samples, const std::vector<int>& labels,
                                 Fitter&& fit_binary) {
    if (samples.size() != static_cast<Index>(labels.size()))
        throw DimensionError("fit_one_vs_rest: samples and labels differ in size");
    OneVsRest<Model> ovr;
    ovr.classes = distinct_classes(labels);
    if (ovr.classes.size() < 2) throw DataError("one-vs-rest needs at least two classes");
    ovr.models.reserve(ovr.classes.size());
    for (int cls : ovr.classes) {
        Vector y(samples.size());
        for (Index i = 0; i < samples.size(); ++i)
            y[i] = labels[static_cast<std::size_t>(i)] == cls ? 1.0 : -1.0;
        ovr.models.push_back(fit_binary(samples, y));
    }
    return ovr;
}

// Argmax of merged decision scores; exact ties go to the lowest class index.
template <class Model>
std::vector<int> predict_one_vs_rest(const OneVsRest<Model>& ovr, const SampleSet& test) {
    std::vector<Vector> scores;
    scores.reserve(ovr.models.size());
    for (const auto& m : ovr.models) scores.push_back(m.merged_scores(test));
    std::vector<int> out(static_cast<std::size_t>(test.size()));
    for (Index i = 0; i < test.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.size(); ++c)
            if (scores[c][i] > scores[best][i]) best = c;
        out[static_cast<std::size_t>(i)] = ovr.classes[best];
    }
    return out;
}

inline OneVsRest<AskLsModel> fit_ovr_askls(const SampleSet& samples, const std::vector<int>& labels,
                                           const KernelSpec& spec, double gamma,
                                           MergeStrategy merge = MergeStrategy::AverageScores) {
    return fit_one_vs_rest<AskLsModel>(samples, labels, [&](const SampleSet& s, const Vector& y) {
        return AskLsModel::fit(s, y, spec, gamma, merge);
    });
}

inline OneVsRest<LssvmModel> fit_ovr_lssvm(const SampleSet& samples, const std::vector<int>& labels,
                                           const KernelSpec& spec, double gamma) {
    return fit_one_vs_rest<LssvmModel>(samples, labels, [&](const SampleSet& s, const Vector& y) {
        return LssvmModel::fit(s, y, spec, gamma);
    });
}

}  // namespace askls
