#include "dcfl/data/partition.hpp"

#include "dcfl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

namespace dcfl::data {

namespace {

struct Slot {
    int client;
    int session;
};

// (class, domain); domain -1 pools a class across all domains.
using PoolKey = std::pair<int, int>;

enum class Shortfall { Throw, Skip };

ClientSchedule empty_schedule(Scenario scenario, int clients, int sessions, int rounds_per_session) {
    ClientSchedule sched;
    sched.scenario = scenario;
    sched.num_clients = clients;
    sched.num_sessions = sessions;
    sched.rounds_per_session = rounds_per_session;
    sched.assignment.assign(static_cast<std::size_t>(clients),
                            std::vector<std::vector<std::size_t>>(static_cast<std::size_t>(sessions)));
    sched.class_sets.assign(static_cast<std::size_t>(clients),
                            std::vector<std::vector<int>>(static_cast<std::size_t>(sessions)));
    return sched;
}

// Shuffles each pool, truncates it to a multiple of its slot count and deals
// equal contiguous chunks to the slots.
void deal(const Dataset& dataset, const std::map<PoolKey, std::vector<Slot>>& slots, ClientSchedule& sched,
          numkit::RngStream& rng, Shortfall shortfall) {
    std::map<PoolKey, std::vector<std::size_t>> pools;
    for (const auto& [key, _] : slots) pools[key];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Example& ex = dataset[i];
        if (auto it = pools.find({ex.label, -1}); it != pools.end()) it->second.push_back(i);
        if (auto it = pools.find({ex.label, ex.domain}); it != pools.end()) it->second.push_back(i);
    }

    for (const auto& [key, owners] : slots) {
        auto& pool = pools[key];
        const std::size_t n_slots = owners.size();
        if (pool.size() < n_slots) {
            if (shortfall == Shortfall::Skip) continue;
            throw DomainError("partition: class " + std::to_string(key.first) + " has " +
                              std::to_string(pool.size()) + " samples for " + std::to_string(n_slots) + " slots");
        }
        auto pool_rng = rng.split(static_cast<std::uint64_t>(key.first) * 4096u + static_cast<std::uint64_t>(key.second + 1));
        pool_rng.shuffle(std::span<std::size_t>(pool));
        const std::size_t per_slot = pool.size() / n_slots;
        for (std::size_t j = 0; j < n_slots; ++j) {
            auto& dst = sched.assignment[static_cast<std::size_t>(owners[j].client)]
                                        [static_cast<std::size_t>(owners[j].session)];
            dst.insert(dst.end(), pool.begin() + static_cast<std::ptrdiff_t>(j * per_slot),
                       pool.begin() + static_cast<std::ptrdiff_t>((j + 1) * per_slot));
        }
    }
    for (auto& per_client : sched.assignment) {
        for (auto& idx : per_client) std::sort(idx.begin(), idx.end());
    }
}

void check_class_inc_args(const Dataset& dataset, int clients, int sessions, int cps, int rounds_per_session) {
    if (clients < 1) throw DomainError("partition: need at least one client");
    if (sessions < 1) throw DomainError("partition: need at least one session");
    if (cps < 1) throw DomainError("partition: classes_per_session must be >= 1");
    if (rounds_per_session < 1) throw DomainError("partition: rounds_per_session must be >= 1");
    if (sessions * cps > dataset.num_classes()) {
        throw DomainError("partition: sessions * classes_per_session = " + std::to_string(sessions * cps) +
                          " exceeds the class count " + std::to_string(dataset.num_classes()));
    }
}

ClientSchedule class_incremental(const Dataset& dataset, Scenario scenario, int clients, int sessions, int cps,
                                 numkit::RngStream& rng, int rounds_per_session) {
    check_class_inc_args(dataset, clients, sessions, cps, rounds_per_session);
    const int num_classes = dataset.num_classes();
    const int shift_per_client = scenario == Scenario::ClassIncNonIID ? cps : 0;

    ClientSchedule sched = empty_schedule(scenario, clients, sessions, rounds_per_session);
    std::map<PoolKey, std::vector<Slot>> slots;
    for (int s = 0; s < sessions; ++s) {
        for (int k = 0; k < clients; ++k) {
            auto& set = sched.class_sets[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
            for (int j = 0; j < cps; ++j) {
                const int cls = (s * cps + k * shift_per_client + j) % num_classes;
                set.push_back(cls);
                slots[{cls, -1}].push_back({k, s});
            }
            std::sort(set.begin(), set.end());
        }
    }
    deal(dataset, slots, sched, rng, Shortfall::Throw);
    return sched;
}

} // namespace

std::string_view to_string(Scenario scenario) {
    switch (scenario) {
    case Scenario::ClassIncIID: return "class_inc_iid";
    case Scenario::ClassIncNonIID: return "class_inc_noniid";
    case Scenario::DomainInc: return "domain_inc";
    }
    return "unknown";
}

ClientSchedule partition_class_inc_iid(const Dataset& dataset, int num_clients, int num_sessions,
                                       int classes_per_session, numkit::RngStream& rng, int rounds_per_session) {
    return class_incremental(dataset, Scenario::ClassIncIID, num_clients, num_sessions, classes_per_session, rng,
                             rounds_per_session);
}

ClientSchedule partition_class_inc_noniid(const Dataset& dataset, int num_clients, int num_sessions,
                                          int classes_per_session, numkit::RngStream& rng, int rounds_per_session) {
    return class_incremental(dataset, Scenario::ClassIncNonIID, num_clients, num_sessions, classes_per_session, rng,
                             rounds_per_session);
}

ClientSchedule partition_domain_inc(const Dataset& dataset, int num_clients, numkit::RngStream& rng,
                                    std::vector<int> domain_order, int rounds_per_session) {
    const int num_domains = dataset.num_domains();
    if (num_domains < 2) throw DomainError("partition_domain_inc: dataset needs at least 2 domains");
    if (num_clients < 1) throw DomainError("partition_domain_inc: need at least one client");
    if (rounds_per_session < 1) throw DomainError("partition_domain_inc: rounds_per_session must be >= 1");
    if (domain_order.empty()) {
        domain_order.resize(static_cast<std::size_t>(num_domains));
        std::iota(domain_order.begin(), domain_order.end(), 0);
    }
    {
        auto sorted = domain_order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> expected(static_cast<std::size_t>(num_domains));
        std::iota(expected.begin(), expected.end(), 0);
        if (sorted != expected) throw DomainError("partition_domain_inc: domain_order must permute 0..D-1");
    }

    ClientSchedule sched = empty_schedule(Scenario::DomainInc, num_clients, num_domains, rounds_per_session);
    sched.session_domain = domain_order;

    std::map<PoolKey, std::vector<Slot>> slots;
    for (int s = 0; s < num_domains; ++s) {
        for (int cls = 0; cls < dataset.num_classes(); ++cls) {
            for (int k = 0; k < num_clients; ++k) slots[{cls, domain_order[static_cast<std::size_t>(s)]}].push_back({k, s});
        }
    }
    deal(dataset, slots, sched, rng, Shortfall::Skip);

    for (int k = 0; k < num_clients; ++k) {
        for (int s = 0; s < num_domains; ++s) {
            auto& set = sched.class_sets[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
            for (std::size_t i : sched.indices(k, s)) set.push_back(dataset[i].label);
            std::sort(set.begin(), set.end());
            set.erase(std::unique(set.begin(), set.end()), set.end());
        }
    }
    return sched;
}

std::vector<std::string> partition_violations(const ClientSchedule& sched, const Dataset& dataset,
                                              int classes_per_session) {
    std::vector<std::string> out;
    auto fail = [&](std::string msg) { out.push_back(std::move(msg)); };
    auto cell = [](int k, int s) { return "(client " + std::to_string(k) + ", session " + std::to_string(s) + ")"; };

    const auto K = static_cast<std::size_t>(sched.num_clients);
    const auto S = static_cast<std::size_t>(sched.num_sessions);
    if (sched.assignment.size() != K || sched.class_sets.size() != K) {
        fail("schedule tables do not have one row per client");
        return out;
    }
    const bool by_domain = sched.scenario == Scenario::DomainInc;
    if (by_domain && sched.session_domain.size() != S) {
        fail("session_domain does not have one entry per session");
        return out;
    }

    std::vector<int> owner_count(dataset.size(), 0);
    // Pool key -> per-cell counts of that pool's examples.
    std::map<PoolKey, std::map<std::pair<int, int>, std::size_t>> shares;
    for (std::size_t k = 0; k < K; ++k) {
        if (sched.assignment[k].size() != S || sched.class_sets[k].size() != S) {
            fail("client " + std::to_string(k) + " does not have one cell per session");
            return out;
        }
        for (std::size_t s = 0; s < S; ++s) {
            const int ki = static_cast<int>(k);
            const int si = static_cast<int>(s);
            const auto& idx = sched.assignment[k][s];
            const auto& classes = sched.class_sets[k][s];
            if (!std::is_sorted(idx.begin(), idx.end())) fail(cell(ki, si) + " indices not ascending");

            if (!by_domain) {
                std::vector<int> expected;
                const int shift = sched.scenario == Scenario::ClassIncNonIID ? classes_per_session : 0;
                for (int j = 0; j < classes_per_session; ++j) {
                    expected.push_back((si * classes_per_session + ki * shift + j) % dataset.num_classes());
                }
                std::sort(expected.begin(), expected.end());
                if (classes != expected) fail(cell(ki, si) + " class set differs from the scenario layout");
            }

            std::set<int> present;
            for (std::size_t i : idx) {
                if (i >= dataset.size()) {
                    fail(cell(ki, si) + " index out of range");
                    continue;
                }
                ++owner_count[i];
                const Example& ex = dataset[i];
                present.insert(ex.label);
                if (!std::binary_search(classes.begin(), classes.end(), ex.label)) {
                    fail(cell(ki, si) + " holds class " + std::to_string(ex.label) + " outside its class set");
                }
                if (by_domain && ex.domain != sched.session_domain[s]) {
                    fail(cell(ki, si) + " holds domain " + std::to_string(ex.domain) + " outside its session domain");
                }
                ++shares[by_domain ? PoolKey{ex.label, ex.domain} : PoolKey{ex.label, -1}][{ki, si}];
            }
            if (!by_domain) {
                for (int c : classes) {
                    if (!present.contains(c)) fail(cell(ki, si) + " has no examples of scheduled class " + std::to_string(c));
                }
            }
        }
    }

    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (owner_count[i] > 1) fail("example " + std::to_string(i) + " assigned to more than one cell");
    }

    if (by_domain) {
        auto order = sched.session_domain;
        std::sort(order.begin(), order.end());
        for (std::size_t s = 0; s < order.size(); ++s) {
            if (order[s] != static_cast<int>(s)) {
                fail("session_domain is not a permutation of the domains");
                break;
            }
        }
    }

    // Pool sizes over the whole dataset.
    std::map<PoolKey, std::size_t> pool_size;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Example& ex = dataset[i];
        ++pool_size[by_domain ? PoolKey{ex.label, ex.domain} : PoolKey{ex.label, -1}];
    }
    for (const auto& [key, per_cell] : shares) {
        std::size_t total = 0;
        const std::size_t first = per_cell.begin()->second;
        for (const auto& [c, n] : per_cell) {
            total += n;
            if (n != first) {
                fail("pool (class " + std::to_string(key.first) + ", domain " + std::to_string(key.second) +
                     ") dealt unequal shares");
                break;
            }
        }
        // Every slot of a pool receives the same share, so the leftover is
        // smaller than the number of slots.
        if (pool_size[key] - total >= per_cell.size()) {
            fail("pool (class " + std::to_string(key.first) + ", domain " + std::to_string(key.second) +
                 ") leaves a remainder of " + std::to_string(pool_size[key] - total));
        }
    }
    if (by_domain) {
        for (const auto& [key, n] : pool_size) {
            if (n < K) continue;
            const auto it = shares.find(key);
            if (it == shares.end() || it->second.size() != K) {
                fail("pool (class " + std::to_string(key.first) + ", domain " + std::to_string(key.second) +
                     ") not dealt to every client");
            }
        }
    }
    return out;
}

TrainTestSplit train_test_split(const Dataset& dataset, double test_fraction, numkit::RngStream& rng) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw DomainError("train_test_split: test_fraction must lie in (0, 1)");
    }
    std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < dataset.size(); ++i) strata[{dataset[i].label, dataset[i].domain}].push_back(i);

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (auto& [key, idx] : strata) {
        if (idx.size() < 2) {
            throw DomainError("train_test_split: stratum (class " + std::to_string(key.first) + ", domain " +
                              std::to_string(key.second) + ") has fewer than 2 samples");
        }
        auto stratum_rng = rng.split(static_cast<std::uint64_t>(key.first) * 4096u + static_cast<std::uint64_t>(key.second));
        stratum_rng.shuffle(std::span<std::size_t>(idx));
        const auto n = static_cast<long>(idx.size());
        const long n_test = std::clamp(std::lround(test_fraction * static_cast<double>(n)), 1L, n - 1);
        test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + n_test);
        train_idx.insert(train_idx.end(), idx.begin() + n_test, idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {dataset.subset(train_idx), dataset.subset(test_idx)};
}

} // namespace dcfl::data
