// oracle.hpp
//
// Deterministic analytical power/performance/area generator. It plays the
// role of the expensive characterization flow in the modeling pipeline: the
// surrogate models are trained against it and validated against it. Its
// closed forms depend on every model feature, honor the qualitative
// orderings between PE types, and keep power/area exactly degree-2 in the
// model feature space so surrogate correctness is provable. The shipped
// default constants are oracle parameters, not claims about any silicon
// process.

#ifndef QADSE_ORACLE_HPP
#define QADSE_ORACLE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qadse/model.hpp"
#include "qadse/space.hpp"

namespace qadse {

struct PeCostParams {
    double clock_hz = 0.0;
    double pe_power_mw = 0.0;  // per-PE base power
    double pe_area_mm2 = 0.0;  // per-PE base area
};

struct OracleParams {
    std::array<PeCostParams, 4> pe;   // indexed by static_cast<int>(PeType)
    double sp_power_mw_per_byte = 0.0;
    double glb_power_mw_per_byte = 0.0;
    double sp_area_mm2_per_byte = 0.0;
    double glb_area_mm2_per_byte = 0.0;
    double spill_factor = 2.0;        // applied when a layer's tensors exceed glb
    bool smooth = false;              // replace every ceil(x) by x

    const PeCostParams& of(PeType pe_type) const {
        return pe[static_cast<std::size_t>(pe_type)];
    }

    // Positivity plus the FP32 > INT16 > LightPE2 > LightPE1 power/area
    // orderings and the reverse clock ordering.
    void validate() const;

    static OracleParams defaults();
};

OracleParams load_oracle_params(const std::string& text);
std::string serialize(const OracleParams& params);

// Work measure: E^2 * C * F * K^2 multiply-accumulates.
std::int64_t layer_macs(const LayerShape& layer);

// Row-stationary style cycle model:
//   folds  = ceil(K / pe_rows) * ceil(E / pe_cols)
//   active = min(K * E, pe_rows * pe_cols)
//   cycles_compute = folds * ceil(macs / (folds * active))
//   traffic = A^2 C b_a rho_if + K^2 C F b_w rho_w + 2 E^2 F b_ps rho_ps
//     with per-scratchpad refill counts rho_* and a spill_factor multiplier
//     when the layer's tensors exceed the global buffer
//   cycles_mem = ceil(traffic / bw)
//   cycles_skip = rs * ceil(2 E^2 F b_a / bw) + ds * 2 * ceil(2 E^2 F b_a / bw)
//   cycles = max(cycles_compute, cycles_mem) + cycles_skip
// In smooth mode every ceil is the identity and the result is real-valued.
double layer_cycles(const AcceleratorConfig& cfg, const LayerShape& layer,
                    const OracleParams& params);

// Sum of layer cycles divided by the PE type's clock.
double network_latency_s(const AcceleratorConfig& cfg, const NetworkConfig& net,
                         const OracleParams& params);

// power = p_glb * glb + #PE * (p_pe + p_sp * (sp_if + sp_fw + sp_ps))   [mW]
// area  = a_glb * glb + #PE * (a_pe + a_sp * (sp_if + sp_fw + sp_ps))   [mm^2]
double oracle_power_mw(const AcceleratorConfig& cfg, const OracleParams& params);
double oracle_area_mm2(const AcceleratorConfig& cfg, const OracleParams& params);

struct CostRecord {
    double power_mw = 0.0;
    double latency_s = 0.0;
    double area_mm2 = 0.0;
    double energy_mj = 0.0;   // power_mw * latency_s (mW * s = mJ)
    std::vector<double> cycles_per_layer;
};

CostRecord oracle_cost(const AcceleratorConfig& cfg, const NetworkConfig& net,
                       const OracleParams& params);

// Characterization dataset. Power/area rows carry the 4 hardware features,
// latency rows the 12 hardware+layer features plus RS/DS, one file per
// (target, PE type):
//   power/area: sp_if,sp_ps,sp_fw,n_pe,target
//   latency:    sp_if,sp_ps,sp_fw,pe_rows,pe_cols,glb,a,c,f,k,s,p,rs,ds,target
// Rows are ordered by (config index, layer index); floats use 9 significant
// digits. With max_configs set, that many valid configs are sampled without
// replacement (seeded); otherwise the full space is enumerated and the seed
// has no effect.
struct DatasetSinks {
    // Indexed by PeType; any stream may be null to skip that output.
    std::array<std::ostream*, 4> power{};
    std::array<std::ostream*, 4> area{};
    std::array<std::ostream*, 4> latency{};
};

struct DatasetStats {
    std::uint64_t configs_used = 0;
    std::uint64_t configs_skipped = 0;
    std::array<std::uint64_t, 4> power_rows{};
    std::array<std::uint64_t, 4> latency_rows{};
};

DatasetStats gen_dataset(const ConfigSpaceSpec& space,
                         const std::vector<NetworkConfig>& nets,
                         const OracleParams& params, std::uint64_t seed,
                         std::optional<std::uint64_t> max_configs,
                         DatasetSinks& sinks);

extern const char* const kPowerAreaCsvHeader;
extern const char* const kLatencyCsvHeader;

} // namespace qadse

#endif
