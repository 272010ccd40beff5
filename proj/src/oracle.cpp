#include "qadse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qadse/rng.hpp"

namespace qadse {

using ordered_json = nlohmann::ordered_json;

const char* const kPowerAreaCsvHeader = "sp_if,sp_ps,sp_fw,n_pe,target";
const char* const kLatencyCsvHeader =
    "sp_if,sp_ps,sp_fw,pe_rows,pe_cols,glb,a,c,f,k,s,p,rs,ds,target";

void OracleParams::validate() const {
    for (PeType t : kAllPeTypes) {
        const PeCostParams& p = of(t);
        if (p.clock_hz <= 0 || p.pe_power_mw <= 0 || p.pe_area_mm2 <= 0)
            throw ValidationError(std::string("oracle params for ") + to_string(t) +
                                  " must be positive");
    }
    if (sp_power_mw_per_byte <= 0 || glb_power_mw_per_byte <= 0 ||
        sp_area_mm2_per_byte <= 0 || glb_area_mm2_per_byte <= 0)
        throw ValidationError("oracle density params must be positive");
    if (spill_factor < 1.0)
        throw ValidationError("spill_factor must be >= 1");

    auto ordered = [](double a, double b, double c, double d, const char* what) {
        if (!(a > b && b > c && c > d))
            throw ValidationError(std::string("oracle ") + what +
                                  " must satisfy FP32 > INT16 > LightPE2 > LightPE1");
    };
    ordered(of(PeType::FP32).pe_power_mw, of(PeType::INT16).pe_power_mw,
            of(PeType::LightPE2).pe_power_mw, of(PeType::LightPE1).pe_power_mw,
            "pe_power_mw");
    ordered(of(PeType::FP32).pe_area_mm2, of(PeType::INT16).pe_area_mm2,
            of(PeType::LightPE2).pe_area_mm2, of(PeType::LightPE1).pe_area_mm2,
            "pe_area_mm2");
    ordered(of(PeType::LightPE1).clock_hz, of(PeType::LightPE2).clock_hz,
            of(PeType::INT16).clock_hz, of(PeType::FP32).clock_hz,
            "clock_hz (reversed)");
}

OracleParams OracleParams::defaults() {
    OracleParams p;
    p.pe[static_cast<int>(PeType::FP32)] = {275.0e6, 3.2, 0.021};
    p.pe[static_cast<int>(PeType::INT16)] = {285.0e6, 1.4, 0.009};
    p.pe[static_cast<int>(PeType::LightPE2)] = {435.0e6, 0.45, 0.003};
    p.pe[static_cast<int>(PeType::LightPE1)] = {455.0e6, 0.3, 0.002};
    p.sp_power_mw_per_byte = 1.2e-3;
    // Global-buffer densities are small: the power/area feature spaces omit
    // glb, and characterization fits stay near-exact only if its share is
    // negligible.
    p.glb_power_mw_per_byte = 3.5e-6;
    p.sp_area_mm2_per_byte = 6.0e-6;
    p.glb_area_mm2_per_byte = 6.0e-8;
    p.spill_factor = 2.0;
    p.smooth = false;
    return p;
}

OracleParams load_oracle_params(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("malformed JSON in oracle params");
    if (!j.is_object()) throw ValidationError("oracle params must be a JSON object");

    auto num = [](const ordered_json& obj, const char* field) {
        if (!obj.contains(field) || !obj.at(field).is_number())
            throw ValidationError(std::string("oracle params: missing numeric field \"") +
                                  field + "\"");
        return obj.at(field).get<double>();
    };

    OracleParams p;
    if (!j.contains("pe") || !j.at("pe").is_object())
        throw ValidationError("oracle params: missing object field \"pe\"");
    for (PeType t : kAllPeTypes) {
        const char* name = to_string(t);
        if (!j.at("pe").contains(name))
            throw ValidationError(std::string("oracle params: missing pe entry \"") +
                                  name + "\"");
        const auto& e = j.at("pe").at(name);
        PeCostParams& out = p.pe[static_cast<std::size_t>(t)];
        out.clock_hz = num(e, "clock_hz");
        out.pe_power_mw = num(e, "pe_power_mw");
        out.pe_area_mm2 = num(e, "pe_area_mm2");
    }
    p.sp_power_mw_per_byte = num(j, "sp_power_mw_per_byte");
    p.glb_power_mw_per_byte = num(j, "glb_power_mw_per_byte");
    p.sp_area_mm2_per_byte = num(j, "sp_area_mm2_per_byte");
    p.glb_area_mm2_per_byte = num(j, "glb_area_mm2_per_byte");
    p.spill_factor = num(j, "spill_factor");
    if (j.contains("smooth")) {
        if (!j.at("smooth").is_boolean())
            throw ValidationError("oracle params: \"smooth\" must be a boolean");
        p.smooth = j.at("smooth").get<bool>();
    }
    p.validate();
    return p;
}

std::string serialize(const OracleParams& params) {
    ordered_json j;
    j["pe"] = ordered_json::object();
    for (PeType t : kAllPeTypes) {
        ordered_json e;
        const PeCostParams& p = params.of(t);
        e["clock_hz"] = p.clock_hz;
        e["pe_power_mw"] = p.pe_power_mw;
        e["pe_area_mm2"] = p.pe_area_mm2;
        j["pe"][to_string(t)] = e;
    }
    j["sp_power_mw_per_byte"] = params.sp_power_mw_per_byte;
    j["glb_power_mw_per_byte"] = params.glb_power_mw_per_byte;
    j["sp_area_mm2_per_byte"] = params.sp_area_mm2_per_byte;
    j["glb_area_mm2_per_byte"] = params.glb_area_mm2_per_byte;
    j["spill_factor"] = params.spill_factor;
    j["smooth"] = params.smooth;
    return j.dump(2) + "\n";
}

std::int64_t layer_macs(const LayerShape& layer) {
    const std::int64_t e = output_dim(layer);
    return e * e * layer.c * layer.f * static_cast<std::int64_t>(layer.k) * layer.k;
}

double layer_cycles(const AcceleratorConfig& cfg, const LayerShape& layer,
                    const OracleParams& params) {
    const auto up = [&](double x) { return params.smooth ? x : std::ceil(x); };

    const double e = output_dim(layer);
    const double a = layer.a, c = layer.c, f = layer.f, k = layer.k;
    const double macs = e * e * c * f * k * k;

    const double folds = up(k / cfg.pe_rows) * up(e / cfg.pe_cols);
    const double active =
        std::min(k * e, static_cast<double>(cfg.pe_rows) * cfg.pe_cols);
    const double cycles_compute = folds * up(macs / (folds * active));

    const double b_a = activation_bytes(cfg.pe_type);
    const double b_w = weight_bytes(cfg.pe_type);
    const double b_ps = psum_bytes(cfg.pe_type);

    const double rho_if = std::max(1.0, up(k * a * b_a / static_cast<double>(cfg.sp_if)));
    const double rho_w = std::max(1.0, up(k * k * b_w / static_cast<double>(cfg.sp_fw)));
    const double rho_ps = std::max(1.0, up(e * b_ps / static_cast<double>(cfg.sp_ps)));

    // Weight bytes round up at the tensor level (LightPE-1 uses half bytes).
    const double ifmap_bytes = a * a * c * b_a;
    const double weight_bytes_total = up(k * k * c * f * b_w);
    const double psum_bytes_total = 2.0 * e * e * f * b_ps;

    double traffic = ifmap_bytes * rho_if + weight_bytes_total * rho_w +
                     psum_bytes_total * rho_ps;
    const double footprint = ifmap_bytes + k * k * c * f * b_w + e * e * f * b_ps;
    if (footprint > static_cast<double>(cfg.glb)) traffic *= params.spill_factor;

    const double cycles_mem = up(traffic / static_cast<double>(cfg.bw));
    const double skip_unit = up(2.0 * e * e * f * b_a / static_cast<double>(cfg.bw));
    const double cycles_skip = layer.rs * skip_unit + layer.ds * 2.0 * skip_unit;

    return std::max(cycles_compute, cycles_mem) + cycles_skip;
}

double network_latency_s(const AcceleratorConfig& cfg, const NetworkConfig& net,
                         const OracleParams& params) {
    double cycles = 0.0;
    for (const LayerShape& layer : net.layers) cycles += layer_cycles(cfg, layer, params);
    return cycles / params.of(cfg.pe_type).clock_hz;
}

double oracle_power_mw(const AcceleratorConfig& cfg, const OracleParams& params) {
    const double sp_total = static_cast<double>(cfg.sp_if + cfg.sp_fw + cfg.sp_ps);
    return params.glb_power_mw_per_byte * static_cast<double>(cfg.glb) +
           cfg.num_pe() * (params.of(cfg.pe_type).pe_power_mw +
                           params.sp_power_mw_per_byte * sp_total);
}

double oracle_area_mm2(const AcceleratorConfig& cfg, const OracleParams& params) {
    const double sp_total = static_cast<double>(cfg.sp_if + cfg.sp_fw + cfg.sp_ps);
    return params.glb_area_mm2_per_byte * static_cast<double>(cfg.glb) +
           cfg.num_pe() * (params.of(cfg.pe_type).pe_area_mm2 +
                           params.sp_area_mm2_per_byte * sp_total);
}

CostRecord oracle_cost(const AcceleratorConfig& cfg, const NetworkConfig& net,
                       const OracleParams& params) {
    CostRecord rec;
    rec.cycles_per_layer.reserve(net.layers.size());
    double cycles = 0.0;
    for (const LayerShape& layer : net.layers) {
        const double lc = layer_cycles(cfg, layer, params);
        rec.cycles_per_layer.push_back(lc);
        cycles += lc;
    }
    rec.latency_s = cycles / params.of(cfg.pe_type).clock_hz;
    rec.power_mw = oracle_power_mw(cfg, params);
    rec.area_mm2 = oracle_area_mm2(cfg, params);
    rec.energy_mj = rec.power_mw * rec.latency_s;
    return rec;
}

DatasetStats gen_dataset(const ConfigSpaceSpec& space,
                         const std::vector<NetworkConfig>& nets,
                         const OracleParams& params, std::uint64_t seed,
                         std::optional<std::uint64_t> max_configs,
                         DatasetSinks& sinks) {
    space.validate();
    if (nets.empty()) throw ValidationError("gen_dataset requires at least one network");
    for (const NetworkConfig& net : nets) net.validate();

    EnumerationResult enumeration = enumerate_space(space);
    if (enumeration.configs.empty())
        throw ValidationError("design space contains no valid configurations");

    std::vector<EnumeratedConfig>& configs = enumeration.configs;
    if (max_configs && *max_configs < configs.size()) {
        // Uniform sample without replacement, then restore enumeration order.
        Rng rng(seed);
        std::vector<std::uint64_t> idx(configs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        rng.shuffle(idx);
        idx.resize(static_cast<std::size_t>(*max_configs));
        std::sort(idx.begin(), idx.end());
        std::vector<EnumeratedConfig> picked;
        picked.reserve(idx.size());
        for (std::uint64_t i : idx) picked.push_back(configs[static_cast<std::size_t>(i)]);
        configs = std::move(picked);
    }

    DatasetStats stats;
    stats.configs_used = configs.size();
    stats.configs_skipped = enumeration.skipped;

    std::array<bool, 4> header_pa{};
    std::array<bool, 4> header_lat{};

    for (const EnumeratedConfig& ec : configs) {
        const AcceleratorConfig& cfg = ec.config;
        const auto t = static_cast<std::size_t>(cfg.pe_type);

        if (sinks.power[t] || sinks.area[t]) {
            const std::string features = std::to_string(cfg.sp_if) + "," +
                                         std::to_string(cfg.sp_ps) + "," +
                                         std::to_string(cfg.sp_fw) + "," +
                                         std::to_string(cfg.num_pe());
            if (sinks.power[t]) {
                if (!header_pa[t]) *sinks.power[t] << kPowerAreaCsvHeader << "\n";
                *sinks.power[t] << features << ","
                                << format_g9(oracle_power_mw(cfg, params)) << "\n";
            }
            if (sinks.area[t]) {
                if (!header_pa[t]) *sinks.area[t] << kPowerAreaCsvHeader << "\n";
                *sinks.area[t] << features << ","
                               << format_g9(oracle_area_mm2(cfg, params)) << "\n";
            }
            header_pa[t] = true;
            ++stats.power_rows[t];
        }

        if (sinks.latency[t]) {
            if (!header_lat[t]) {
                *sinks.latency[t] << kLatencyCsvHeader << "\n";
                header_lat[t] = true;
            }
            const double clock = params.of(cfg.pe_type).clock_hz;
            for (const NetworkConfig& net : nets) {
                for (const LayerShape& l : net.layers) {
                    const double latency = layer_cycles(cfg, l, params) / clock;
                    *sinks.latency[t]
                        << cfg.sp_if << "," << cfg.sp_ps << "," << cfg.sp_fw << ","
                        << cfg.pe_rows << "," << cfg.pe_cols << "," << cfg.glb << ","
                        << l.a << "," << l.c << "," << l.f << "," << l.k << ","
                        << l.s << "," << l.p << "," << l.rs << "," << l.ds << ","
                        << format_g9(latency) << "\n";
                    ++stats.latency_rows[t];
                }
            }
        }
    }
    return stats;
}

} // namespace qadse
