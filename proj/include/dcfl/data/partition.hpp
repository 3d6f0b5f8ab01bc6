#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/numkit/rng.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dcfl::data {

enum class Scenario { ClassIncIID, ClassIncNonIID, DomainInc };

std::string_view to_string(Scenario scenario);

/// Per-client, per-session dataset indices.
struct ClientSchedule {
    Scenario scenario = Scenario::ClassIncIID;
    int num_clients = 0;
    int num_sessions = 0;
    int rounds_per_session = 1;
    /// assignment[k][s]: indices into the source dataset, ascending.
    std::vector<std::vector<std::vector<std::size_t>>> assignment;
    /// class_sets[k][s]: the classes client k is scheduled to hold in session s.
    std::vector<std::vector<std::vector<int>>> class_sets;
    /// session_domain[s]: the domain served in session s (DomainInc only).
    std::vector<int> session_domain;

    [[nodiscard]] const std::vector<std::size_t>& indices(int client, int session) const {
        return assignment.at(static_cast<std::size_t>(client)).at(static_cast<std::size_t>(session));
    }
    [[nodiscard]] int total_rounds() const noexcept { return num_sessions * rounds_per_session; }
    /// Session of a zero-based round index.
    [[nodiscard]] int session_of_round(int round) const noexcept { return round / rounds_per_session; }
};

/// Every client sees the same class set per session; sessions take classes
/// in ascending blocks of `classes_per_session`.
ClientSchedule partition_class_inc_iid(const Dataset& dataset, int num_clients, int num_sessions,
                                       int classes_per_session, numkit::RngStream& rng,
                                       int rounds_per_session = 1);

/// Client k's session-s classes are the IID session-s block shifted by
/// k * classes_per_session (mod C).
ClientSchedule partition_class_inc_noniid(const Dataset& dataset, int num_clients, int num_sessions,
                                          int classes_per_session, numkit::RngStream& rng,
                                          int rounds_per_session = 1);

/// One session per domain, in `domain_order` (ascending when empty). Each
/// (class, domain) stratum is dealt evenly across all clients.
ClientSchedule partition_domain_inc(const Dataset& dataset, int num_clients, numkit::RngStream& rng,
                                    std::vector<int> domain_order = {}, int rounds_per_session = 1);

/// Structural checks on a schedule built from `dataset`: index range and
/// ordering, disjointness across all (client, session) cells, the class or
/// domain layout of the scenario, equal shares per pool and coverage up to
/// the truncation remainder. Returns one message per violation.
std::vector<std::string> partition_violations(const ClientSchedule& schedule, const Dataset& dataset,
                                              int classes_per_session);

struct TrainTestSplit {
    Dataset train;
    Dataset test;
};

/// Stratified by (class, domain). Each stratum keeps at least one example on
/// each side, so strata with fewer than two examples are rejected.
TrainTestSplit train_test_split(const Dataset& dataset, double test_fraction, numkit::RngStream& rng);

} // namespace dcfl::data
