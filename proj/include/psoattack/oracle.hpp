#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace psoattack {

enum class QueryPhase : std::size_t {
    Init = 0,
    Optimize,
    Baseline,
    Centroid,
    Mutation,
    Reduction
};

inline constexpr std::size_t kPhaseCount = 6;

const char* phase_name(QueryPhase phase);

struct QueryLedgerSnapshot {
    std::uint64_t total = 0;
    std::array<std::uint64_t, kPhaseCount> per_phase{};

    std::uint64_t phase(QueryPhase p) const {
        return per_phase[static_cast<std::size_t>(p)];
    }
    bool operator==(const QueryLedgerSnapshot&) const = default;
};

// Exact count of model evaluations, split by attack phase. Increments are
// atomic and query indices are unique and gap-free under concurrent callers.
class QueryLedger {
public:
    std::uint64_t record(QueryPhase phase) {
        per_phase_[static_cast<std::size_t>(phase)].fetch_add(1, std::memory_order_relaxed);
        return total_.fetch_add(1, std::memory_order_relaxed) + 1;
    }

    std::uint64_t total() const { return total_.load(std::memory_order_relaxed); }

    QueryLedgerSnapshot snapshot() const {
        QueryLedgerSnapshot s;
        s.total = total();
        for (std::size_t i = 0; i < kPhaseCount; ++i)
            s.per_phase[i] = per_phase_[i].load(std::memory_order_relaxed);
        return s;
    }

private:
    std::atomic<std::uint64_t> total_{0};
    std::array<std::atomic<std::uint64_t>, kPhaseCount> per_phase_{};
};

struct OracleResponse {
    std::vector<double> probabilities;
    std::size_t predicted_label = 0; // argmax, lowest index on ties
    std::uint64_t query_index = 0;   // ledger total at the time of this query
};

struct OracleError : std::runtime_error {
    OracleError(const std::string& what, bool retryable_)
        : std::runtime_error(what), retryable(retryable_) {}
    bool retryable = false;
};

// The raw model behind the black-box boundary.
class PredictionModel {
public:
    virtual ~PredictionModel() = default;
    // class probabilities for one flattened image; throws OracleError on failure
    virtual std::vector<double> probabilities(std::span<const double> image) const = 0;
    // 0 means "unknown, accept any input length"
    virtual std::size_t input_dim() const = 0;
};

// The only path the attacks may use to evaluate the model: every successful
// prediction lands in the ledger, failed transport does not.
class QueryOracle {
public:
    explicit QueryOracle(const PredictionModel& model) : model_(model) {}

    OracleResponse predict(std::span<const double> image, QueryPhase phase);

    const QueryLedger& ledger() const { return ledger_; }
    QueryLedgerSnapshot snapshot() const { return ledger_.snapshot(); }
    std::uint64_t total_queries() const { return ledger_.total(); }

private:
    const PredictionModel& model_;
    QueryLedger ledger_;
};

std::size_t argmax_lowest(std::span<const double> values);

// Raises OracleError unless entries are in [0,1] and sum to 1 within 1e-6.
// Never repairs the vector.
void validate_probabilities(std::span<const double> probabilities);

} // namespace psoattack
