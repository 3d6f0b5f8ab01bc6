#include "dcfl/flcore/metrics.hpp"

#include "dcfl/errors.hpp"
#include "dcfl/numkit/kl.hpp"

#include <map>

namespace dcfl::flcore {

namespace {

bool selected(const data::Example& ex, const std::set<int>& encountered, EncounterAxis axis) {
    return encountered.contains(axis == EncounterAxis::Class ? ex.label : ex.domain);
}

double restricted_accuracy(std::span<const int> predictions, const data::Dataset& test_set,
                           const std::set<int>* encountered, EncounterAxis axis) {
    std::size_t total = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        if (encountered != nullptr && !selected(test_set[i], *encountered, axis)) continue;
        ++total;
        if (predictions[i] == test_set[i].label) ++correct;
    }
    if (total == 0) throw DomainError("accuracy: no test example selected");
    return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<int> predict_all(const models::MlpParams& params, const data::Dataset& test_set) {
    return models::predict_batch(params, models::make_batch(test_set.examples()).features);
}

std::vector<int> predict_all(const Predictor& predict, const data::Dataset& test_set) {
    std::vector<int> out;
    out.reserve(test_set.size());
    for (const auto& ex : test_set) out.push_back(predict(ex.features));
    return out;
}

} // namespace

double eval_global_accuracy(const models::MlpParams& params, const data::Dataset& test_set) {
    if (test_set.empty()) throw DomainError("eval_global_accuracy: empty test set");
    return restricted_accuracy(predict_all(params, test_set), test_set, nullptr, EncounterAxis::Class);
}

double eval_global_accuracy(const Predictor& predict, const data::Dataset& test_set) {
    if (test_set.empty()) throw DomainError("eval_global_accuracy: empty test set");
    return restricted_accuracy(predict_all(predict, test_set), test_set, nullptr, EncounterAxis::Class);
}

double eval_encountered_accuracy(const models::MlpParams& params, const data::Dataset& test_set,
                                 const std::set<int>& encountered, EncounterAxis axis) {
    if (encountered.empty()) throw DomainError("eval_encountered_accuracy: empty encountered set");
    return restricted_accuracy(predict_all(params, test_set), test_set, &encountered, axis);
}

double eval_encountered_accuracy(const Predictor& predict, const data::Dataset& test_set,
                                 const std::set<int>& encountered, EncounterAxis axis) {
    if (encountered.empty()) throw DomainError("eval_encountered_accuracy: empty encountered set");
    return restricted_accuracy(predict_all(predict, test_set), test_set, &encountered, axis);
}

double synthetic_fidelity_kl(std::span<const data::Example> real_prev, std::span<const data::Example> synthetic) {
    if (real_prev.empty() || synthetic.empty()) throw DomainError("synthetic_fidelity_kl: empty input");
    std::map<int, std::vector<const data::Example*>> real_by_class;
    std::map<int, std::vector<const data::Example*>> syn_by_class;
    for (const auto& ex : real_prev) real_by_class[ex.label].push_back(&ex);
    for (const auto& ex : synthetic) syn_by_class[ex.label].push_back(&ex);

    auto stack = [](const std::vector<const data::Example*>& rows) {
        const auto d = static_cast<Eigen::Index>(rows.front()->features.size());
        numkit::Matrix m(static_cast<Eigen::Index>(rows.size()), d);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            m.row(static_cast<Eigen::Index>(i)) = numkit::ConstVectorMap(rows[i]->features.data(), d).transpose();
        }
        return m;
    };

    bool shared = false;
    double sum = 0.0;
    int used = 0;
    for (const auto& [cls, real_rows] : real_by_class) {
        auto it = syn_by_class.find(cls);
        if (it == syn_by_class.end()) continue;
        shared = true;
        const auto need = real_rows.front()->features.size() + 2;
        if (real_rows.size() < need || it->second.size() < need) continue;
        sum += numkit::kl_gaussian_moment(stack(real_rows), stack(it->second));
        ++used;
    }
    if (!shared) throw DomainError("synthetic_fidelity_kl: no shared labels");
    if (used == 0) throw DomainError("synthetic_fidelity_kl: no shared class has enough points for a covariance fit");
    return sum / used;
}

} // namespace dcfl::flcore
