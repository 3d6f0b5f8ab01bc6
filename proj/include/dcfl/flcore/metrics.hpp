#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/models/mlp.hpp"

#include <functional>
#include <set>
#include <span>

namespace dcfl::flcore {

using Predictor = std::function<int(std::span<const double>)>;

/// Fraction of test examples classified correctly. Throws DomainError on an empty set.
double eval_global_accuracy(const models::MlpParams& params, const data::Dataset& test_set);
double eval_global_accuracy(const Predictor& predict, const data::Dataset& test_set);

/// Which example attribute the encountered set refers to: the class for
/// class-incremental runs, the domain for domain-incremental runs.
enum class EncounterAxis { Class, Domain };

/// Accuracy restricted to test examples whose class (or domain) is in
/// `encountered`. Throws DomainError if `encountered` is empty or selects no example.
double eval_encountered_accuracy(const models::MlpParams& params, const data::Dataset& test_set,
                                 const std::set<int>& encountered, EncounterAxis axis);
double eval_encountered_accuracy(const Predictor& predict, const data::Dataset& test_set,
                                 const std::set<int>& encountered, EncounterAxis axis);

/// Mean over shared classes of the moment-matched Gaussian KL between the
/// real and synthetic examples of that class. Classes with too few points on
/// either side for a covariance fit are skipped. Throws DomainError when no
/// class qualifies.
double synthetic_fidelity_kl(std::span<const data::Example> real_prev, std::span<const data::Example> synthetic);

} // namespace dcfl::flcore
