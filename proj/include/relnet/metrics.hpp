#pragma once

#include <map>
#include <stdexcept>

#include <json.hpp>

#include "relnet/labels.hpp"

namespace relnet {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Binary confusion metrics on the 0-100 scale. F1 is the harmonic mean of
/// precision and recall (0 when both vanish); macro values are unweighted
/// means of the two classes.
struct ConfusionMetrics {
    ClassMetrics reliable;
    ClassMetrics unreliable;
    ClassMetrics macro;
    double accuracy = 0.0;
};

inline void to_json(nlohmann::json& j, const ClassMetrics& m) {
    j = nlohmann::json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline void to_json(nlohmann::json& j, const ConfusionMetrics& m) {
    j = nlohmann::json{{"reliable", m.reliable},
                       {"unreliable", m.unreliable},
                       {"macro", m.macro},
                       {"accuracy", m.accuracy}};
}

/// Standard confusion-matrix arithmetic over binary predictions. The two
/// maps must have identical key sets.
inline ConfusionMetrics metrics(const std::map<SourceId, ReliabilityLabel>& predictions,
                                const std::map<SourceId, ReliabilityLabel>& gold) {
    if (predictions.size() != gold.size())
        throw std::invalid_argument("metrics: prediction/gold key sets differ in size");

    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    auto pit = predictions.begin();
    auto git = gold.begin();
    for (; pit != predictions.end(); ++pit, ++git) {
        if (pit->first != git->first)
            throw std::invalid_argument("metrics: prediction/gold key sets differ ("
                                        + pit->first.str() + " vs " + git->first.str() + ")");
        const bool pred_rel = pit->second == ReliabilityLabel::Reliable;
        const bool gold_rel = git->second == ReliabilityLabel::Reliable;
        if (pred_rel && gold_rel) ++tp;
        else if (pred_rel && !gold_rel) ++fp;
        else if (!pred_rel && gold_rel) ++fn;
        else ++tn;
    }

    auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
    };
    auto f1_of = [](double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); };

    ConfusionMetrics m;
    m.reliable.precision = ratio(tp, tp + fp);
    m.reliable.recall = ratio(tp, tp + fn);
    m.reliable.f1 = f1_of(m.reliable.precision, m.reliable.recall);
    // the unreliable class counts the same matrix from the other side
    m.unreliable.precision = ratio(tn, tn + fn);
    m.unreliable.recall = ratio(tn, tn + fp);
    m.unreliable.f1 = f1_of(m.unreliable.precision, m.unreliable.recall);
    m.macro.precision = 0.5 * (m.reliable.precision + m.unreliable.precision);
    m.macro.recall = 0.5 * (m.reliable.recall + m.unreliable.recall);
    m.macro.f1 = 0.5 * (m.reliable.f1 + m.unreliable.f1);
    m.accuracy = ratio(tp + tn, tp + fp + fn + tn);
    return m;
}

} // namespace relnet
