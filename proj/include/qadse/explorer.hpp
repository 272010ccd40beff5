// explorer.hpp
//
// Design-space exploration: evaluate enumerated accelerator configs against
// networks using either the analytical oracle or fitted surrogate models,
// derive energy and performance-per-area, normalize against a best-INT16
// reference, and extract Pareto fronts by exact dominance filtering.

#ifndef QADSE_EXPLORER_HPP
#define QADSE_EXPLORER_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qadse/model.hpp"
#include "qadse/oracle.hpp"
#include "qadse/space.hpp"
#include "qadse/surrogate.hpp"

namespace qadse {

// Fitted models per PE type. A sweep only needs entries for the PE types
// that actually appear in the space.
struct SurrogateBundle {
    std::array<std::optional<PolySurrogate>, 4> power;
    std::array<std::optional<PolySurrogate>, 4> area;
    std::array<std::optional<PolySurrogate>, 4> latency;

    void require(PeType pe) const; // throws if any model for pe is missing
};

class CostSource {
public:
    static CostSource from_oracle(OracleParams params);
    static CostSource from_surrogate(SurrogateBundle bundle);

    bool is_surrogate() const { return bundle_ != nullptr; }
    const OracleParams& oracle_params() const;
    const SurrogateBundle& bundle() const;
    const char* name() const { return is_surrogate() ? "surrogate" : "oracle"; }

private:
    CostSource() = default;
    OracleParams params_{};
    std::shared_ptr<const SurrogateBundle> bundle_;
};

struct DesignPoint {
    std::uint64_t config_id = 0;
    AcceleratorConfig config;
    std::string net;
    double power_mw = 0.0;
    double latency_s = 0.0;
    double area_mm2 = 0.0;
    double energy_mj = 0.0;       // power_mw * latency_s
    double perf_per_area = 0.0;   // 1 / (latency_s * area_mm2)
    std::string source;           // "oracle" | "surrogate"
};

// Point-wise evaluation. For a surrogate source the network latency is the
// sum of per-layer model predictions.
DesignPoint evaluate_point(const AcceleratorConfig& cfg, std::uint64_t config_id,
                           const NetworkConfig& net, const CostSource& source);

// True when power, latency and area are all positive. Surrogate
// extrapolation can produce nonphysical values; those points stay in result
// tables as-is but are excluded from fronts, references and summaries.
bool is_physical(const DesignPoint& p);

// Batch evaluator used by sweeps. For surrogate latency models it evaluates
// the polynomial in factorized form: each monomial splits into a config part
// and a layer part, so per-network layer sums are precomputed once and each
// (config, net) prediction reduces to a dot product over config monomials.
// Algebraically identical to summing per-layer predictions.
// Caller-owned scratch for consecutive-config evaluation. None of the model
// features includes device bandwidth, so configs differing only in bw share
// every prediction; the scratch carries them over. Results are identical
// with or without it. Use one instance per thread.
struct MetricsScratch {
    bool valid = false;
    PeType pe_type = PeType::FP32;
    int pe_rows = 0, pe_cols = 0;
    std::int64_t sp_if = 0, sp_fw = 0, sp_ps = 0, glb = 0;
    double power_mw = 0.0, area_mm2 = 0.0;
    std::vector<double> latency_s;
};

class SweepEvaluator {
public:
    SweepEvaluator(const CostSource& source, const std::vector<NetworkConfig>& nets);
    ~SweepEvaluator();
    SweepEvaluator(SweepEvaluator&&) noexcept;

    std::size_t num_nets() const;

    // Evaluation core: power/area for the config and latency per network,
    // with no result-row materialization. latency_s must have num_nets()
    // slots. Thread-safe for concurrent use with distinct scratches.
    void evaluate_config_metrics(const AcceleratorConfig& cfg, double& power_mw,
                                 double& area_mm2, double* latency_s,
                                 MetricsScratch* scratch = nullptr) const;

    // Full design points for one config; out must have num_nets() slots.
    void evaluate_config(const EnumeratedConfig& cfg, DesignPoint* out,
                         MetricsScratch* scratch = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// --- Pareto ---------------------------------------------------------------

struct Objective {
    std::string metric; // power | latency | area | energy | perf_per_area
    bool maximize = false;
};

// Exact dominance filtering over raw metric tuples. Duplicated tuples are
// deduplicated, keeping the smallest input index as representative. The
// result is sorted best-first by the first objective (ties by the remaining
// objectives, then by index). The front as a set of tuples is invariant
// under input permutation.
std::vector<std::size_t> pareto_front_indices(
    const std::vector<std::vector<double>>& points,
    const std::vector<bool>& maximize);

std::vector<std::size_t> pareto_front(const std::vector<DesignPoint>& points,
                                      const std::vector<Objective>& objectives);

double metric_value(const DesignPoint& p, const std::string& metric);

// --- Normalization --------------------------------------------------------

// Index of the INT16 point with the highest performance per area (ties by
// smallest (config_id, net)); throws if the set has no INT16 point.
std::size_t best_int16_reference(const std::vector<DesignPoint>& points);

// Divides every metric by the reference point's metric, so the reference
// maps to 1.0 everywhere. Positive per-metric scaling preserves dominance.
std::vector<DesignPoint> normalize(const std::vector<DesignPoint>& points,
                                   std::size_t reference_index);

// --- Sweep ----------------------------------------------------------------

struct SummaryRow {
    std::string net;
    PeType pe_type;
    std::string metric;
    double min = 0.0, median = 0.0, max = 0.0;
};

struct SweepResult {
    std::vector<DesignPoint> points;      // (config enumeration order, net order)
    std::uint64_t skipped = 0;            // invalid combos in the space
    std::vector<std::string> net_names;
    // Per net: indices into points of the (perf_per_area max, energy min) front.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> fronts;
    std::vector<SummaryRow> summary;      // min/median/max per (net, pe_type)
    bool is_point_on_front(std::size_t point_index) const;
};

// Evaluates every (config, net) pair; jobs > 1 parallelizes across configs
// without changing output bytes. normalize_summary adds norm_* summary rows
// against the best-INT16 reference (requires INT16 in the space) — per net
// by default, or one global reference across all nets.
SweepResult sweep(const ConfigSpaceSpec& space, const std::vector<NetworkConfig>& nets,
                  const CostSource& source, int jobs, bool normalize_summary = true,
                  bool global_reference = false);

std::string sweep_results_csv(const SweepResult& result);
std::string sweep_pareto_csv(const SweepResult& result);
std::string sweep_summary_csv(const SweepResult& result);

} // namespace qadse

#endif
