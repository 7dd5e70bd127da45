#pragma once

// Monte-Carlo availability/latency experiments: encode one file, then decode
// it repeatedly through freshly seeded simulated stores.

#include <cstdint>
#include <string>
#include <vector>

#include "swarm_ec/netstore_sim.hpp"
#include "swarm_ec/parity_planner.hpp"
#include "swarm_ec/retrieval.hpp"

namespace swarm_ec {

struct ExperimentSpec {
    std::uint64_t file_size = 0;
    std::uint64_t content_seed = 1; // file bytes are a pure function of this
    Level level = Level::none;
    bool encrypted = false;
    RetrievalStrategy strategy;
    SimConfig sim;
    int trials = 1;
    bool replicate_root = true;
};

struct ExperimentReport {
    StrategyKind strategy = StrategyKind::race;
    Level level = Level::none;
    double eps = 0.0;
    int trials = 0;
    int successes = 0;
    int mismatches = 0; // reported success with wrong bytes; must stay 0
    double mean_latency_ms = 0.0;
    double p95_latency_ms = 0.0;
    double requests = 0.0; // mean per trial
    double bytes = 0.0;    // mean per trial

    [[nodiscard]] double success_rate() const noexcept { return trials ? static_cast<double>(successes) / trials : 0.0; }

    static std::string csv_header();
    [[nodiscard]] std::string csv_row() const;
};

Bytes experiment_content(std::uint64_t size, std::uint64_t seed);

ExperimentReport run_experiment(const ExperimentSpec& spec);

} // namespace swarm_ec
