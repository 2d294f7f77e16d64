#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/distance.hpp"
#include "kldesign/entropy.hpp"
#include "kldesign/kernels.hpp"

namespace kld {

enum class ObjectiveKind { entropy_mc_gauss, entropy_nn, mindist };

/// Exchange-loop objective; larger is better. propose() evaluates a
/// single-point replacement without committing (nullopt marks an invalid
/// candidate, e.g. a duplicate under the NN estimator); accept() commits
/// the proposal into the design and the internal state.
class Objective {
public:
    virtual ~Objective() = default;
    virtual ObjectiveKind kind() const = 0;

    /// Builds internal state for the design. Throws if the objective is not
    /// evaluable on it (NN estimator with duplicate points).
    virtual void bind(const Design& design) = 0;

    virtual double value() const = 0;

    virtual std::optional<double> propose(const Design& design, std::size_t i,
                                          std::span<const double> y) const = 0;

    virtual void accept(Design& design, std::size_t i, std::span<const double> y) = 0;
};

/// Gaussian-kernel KDE entropy objective. The bandwidth follows the fixed
/// rule for the bound design's (n, d) unless a kernel is supplied.
class KdeGaussObjective final : public Objective {
public:
    KdeGaussObjective() = default;
    explicit KdeGaussObjective(KernelSpec kernel) : kernel_override_(std::move(kernel)) {}

    ObjectiveKind kind() const override { return ObjectiveKind::entropy_mc_gauss; }

    void bind(const Design& design) override {
        const KernelSpec kernel = kernel_override_
                                      ? *kernel_override_
                                      : KernelSpec::gaussian(design.d(), bandwidth(design.n(), design.d()));
        state_.emplace(design, kernel);
    }

    double value() const override { return state_->entropy(); }

    std::optional<double> propose(const Design& design, std::size_t i,
                                  std::span<const double> y) const override {
        try {
            return state_->entropy_after_swap(design, i, y);
        } catch (const DegenerateKernelError&) {
            return std::nullopt;  // unreachable with a gaussian kernel
        }
    }

    void accept(Design& design, std::size_t i, std::span<const double> y) override {
        state_->apply_swap(design, i, y);
    }

private:
    std::optional<KernelSpec> kernel_override_;
    std::optional<KdeState> state_;
};

/// Nearest-neighbor entropy objective. Candidates that collide with an
/// existing point are invalid (worst possible design locally).
class NnObjective final : public Objective {
public:
    ObjectiveKind kind() const override { return ObjectiveKind::entropy_nn; }

    void bind(const Design& design) override { state_.emplace(design); }

    double value() const override { return state_->entropy(); }

    std::optional<double> propose(const Design& design, std::size_t i,
                                  std::span<const double> y) const override {
        try {
            return state_->entropy_after_swap(design, i, y);
        } catch (const ZeroDistanceError&) {
            return std::nullopt;
        }
    }

    void accept(Design& design, std::size_t i, std::span<const double> y) override {
        state_->apply_swap(design, i, y);
    }

private:
    std::optional<NnState> state_;
};

/// Maximin objective: the smallest pairwise distance. Duplicates give 0,
/// which is a legal (never improving) value.
class MindistObjective final : public Objective {
public:
    ObjectiveKind kind() const override { return ObjectiveKind::mindist; }

    void bind(const Design& design) override {
        if (design.n() < 2) throw std::invalid_argument("mindist objective: n must be >= 2");
        state_.emplace(design);
    }

    double value() const override { return state_->min_distance(); }

    std::optional<double> propose(const Design& design, std::size_t i,
                                  std::span<const double> y) const override {
        const auto ev = state_->evaluate_swap(design, i, y);
        double m = std::numeric_limits<double>::infinity();
        for (double r : ev.new_rho) m = std::min(m, r);
        return m;
    }

    void accept(Design& design, std::size_t i, std::span<const double> y) override {
        auto ev = state_->evaluate_swap(design, i, y);
        state_->apply_swap(design, i, y, std::move(ev));
    }

private:
    std::optional<DistanceState> state_;
};

inline std::unique_ptr<Objective> make_objective(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::entropy_mc_gauss: return std::make_unique<KdeGaussObjective>();
        case ObjectiveKind::entropy_nn: return std::make_unique<NnObjective>();
        case ObjectiveKind::mindist: return std::make_unique<MindistObjective>();
    }
    throw std::invalid_argument("make_objective: unknown kind");
}

/// Stopping rules and seeding for the exchange loop. The proposal counters
/// count tested exchanges, accepted or not.
struct OptimizerConfig {
    std::size_t max_proposals = 0;
    std::size_t max_consecutive_rejects = 0;
    std::size_t restarts = 5;
    std::uint64_t seed = 0;

    static OptimizerConfig defaults(std::size_t d, std::uint64_t seed) {
        OptimizerConfig cfg;
        cfg.max_proposals = 1000 * d;
        cfg.max_consecutive_rejects = 100 * d;
        cfg.restarts = 5;
        cfg.seed = seed;
        return cfg;
    }

    void check() const {
        if (max_proposals < 1)
            throw std::invalid_argument("OptimizerConfig: max_proposals must be >= 1");
        if (max_consecutive_rejects < 1)
            throw std::invalid_argument("OptimizerConfig: max_consecutive_rejects must be >= 1");
        if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
    }
};

struct TraceEntry {
    std::size_t proposal;  // 1-based proposal index
    bool accepted;
    double objective;  // value after the accept/reject decision
};

struct Trace {
    double initial_objective = 0.0;
    double final_objective = 0.0;
    std::size_t accepted_count = 0;
    std::vector<TraceEntry> entries;

    std::size_t proposals() const { return entries.size(); }
};

inline void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << "proposal,accepted,objective\n";
    for (const auto& e : trace.entries)
        out << e.proposal << "," << (e.accepted ? 1 : 0) << ","
            << detail::format_double(e.objective) << "\n";
}

inline void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    write_trace_csv(trace, out);
}

struct ExchangeResult {
    Design design;
    Trace trace;
};

/// One exchange run: repeatedly pick a random row, draw a fresh uniform
/// candidate, keep it only on strict improvement. Stops after
/// max_proposals tested exchanges or max_consecutive_rejects refusals in a
/// row. Deterministic for a fixed generator state.
inline ExchangeResult exchange_run(Design design, Objective& objective,
                                   const OptimizerConfig& config, SeededRng& rng) {
    config.check();
    objective.bind(design);

    Trace trace;
    trace.initial_objective = objective.value();
    trace.entries.reserve(std::min<std::size_t>(config.max_proposals, 1 << 20));
    double current = trace.initial_objective;
    std::size_t consecutive_rejects = 0;

    for (std::size_t proposal = 1; proposal <= config.max_proposals; ++proposal) {
        const std::size_t i = rng.uniform_index(design.n());
        const std::vector<double> y = uniform_point(rng, design.d());
        const std::optional<double> candidate = objective.propose(design, i, y);
        const bool accept = candidate.has_value() && *candidate > current;
        if (accept) {
            objective.accept(design, i, y);
            current = *candidate;
            consecutive_rejects = 0;
            ++trace.accepted_count;
        } else {
            ++consecutive_rejects;
        }
        trace.entries.push_back({proposal, accept, current});
        if (consecutive_rejects >= config.max_consecutive_rejects) break;
    }
    trace.final_objective = current;
    return {std::move(design), std::move(trace)};
}

inline ExchangeResult exchange_run(Design design, Objective& objective,
                                   const OptimizerConfig& config) {
    SeededRng rng(config.seed, 0);
    return exchange_run(std::move(design), objective, config, rng);
}

struct MultiStartResult {
    Design best;
    double best_objective = 0.0;
    std::size_t best_restart = 0;  // stream id of the winning restart
    std::vector<Trace> traces;     // one per restart, in stream order
};

/// Runs the exchange from `restarts` independent uniform-random initial
/// designs (stream r of the config seed drives restart r, initial draw
/// included) and keeps the design with the largest final objective; ties go
/// to the lowest stream id. Initial designs the objective cannot evaluate
/// (duplicate rows under the NN estimator) are redrawn.
inline MultiStartResult multi_start(ObjectiveKind kind, std::size_t n, std::size_t d,
                                    const OptimizerConfig& config) {
    config.check();
    MultiStartResult result{Design(1, 1), -std::numeric_limits<double>::infinity(), 0, {}};
    bool have_best = false;

    for (std::size_t r = 0; r < config.restarts; ++r) {
        SeededRng rng(config.seed, r);
        const auto objective = make_objective(kind);

        Design initial(n, d);
        bool bound = false;
        for (int attempt = 0; attempt < 100 && !bound; ++attempt) {
            for (std::size_t i = 0; i < n; ++i) initial.set_point(i, uniform_point(rng, d));
            try {
                objective->bind(initial);
                bound = true;
            } catch (const ZeroDistanceError&) {
                // duplicate rows in the random draw; redraw
            }
        }
        if (!bound) throw std::runtime_error("multi_start: could not draw a valid initial design");

        auto run = exchange_run(std::move(initial), *objective, config, rng);
        if (!have_best || run.trace.final_objective > result.best_objective) {
            result.best = run.design;
            result.best_objective = run.trace.final_objective;
            result.best_restart = r;
            have_best = true;
        }
        result.traces.push_back(std::move(run.trace));
    }
    return result;
}

/// Smallest pairwise distance as a named objective function, shared with
/// the criteria module.
inline double mindist_objective(const Design& design) { return mindist(design); }

}  // namespace kld
