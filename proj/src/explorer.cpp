#include "qadse/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qadse/parallel.hpp"

namespace qadse {

void SurrogateBundle::require(PeType pe) const {
    const auto t = static_cast<std::size_t>(pe);
    if (!power[t] || !area[t] || !latency[t])
        throw ValidationError(std::string("no surrogate models loaded for pe_type ") +
                              to_string(pe));
}

CostSource CostSource::from_oracle(OracleParams params) {
    params.validate();
    CostSource s;
    s.params_ = params;
    return s;
}

CostSource CostSource::from_surrogate(SurrogateBundle bundle) {
    CostSource s;
    s.bundle_ = std::make_shared<const SurrogateBundle>(std::move(bundle));
    return s;
}

const OracleParams& CostSource::oracle_params() const {
    if (is_surrogate()) throw ValidationError("cost source is not an oracle");
    return params_;
}

const SurrogateBundle& CostSource::bundle() const {
    if (!is_surrogate()) throw ValidationError("cost source is not a surrogate");
    return *bundle_;
}

namespace {

constexpr int kLatencyDims = 14;   // sp_if,sp_ps,sp_fw,pe_rows,pe_cols,glb + 8 layer features
constexpr int kConfigDims = 6;
constexpr int kLayerDims = 8;
constexpr int kPowerAreaDims = 4;  // sp_if,sp_ps,sp_fw,n_pe

std::vector<double> power_area_features(const AcceleratorConfig& cfg) {
    return {static_cast<double>(cfg.sp_if), static_cast<double>(cfg.sp_ps),
            static_cast<double>(cfg.sp_fw), static_cast<double>(cfg.num_pe())};
}

std::vector<double> latency_features(const AcceleratorConfig& cfg, const LayerShape& l) {
    return {static_cast<double>(cfg.sp_if), static_cast<double>(cfg.sp_ps),
            static_cast<double>(cfg.sp_fw), static_cast<double>(cfg.pe_rows),
            static_cast<double>(cfg.pe_cols), static_cast<double>(cfg.glb),
            static_cast<double>(l.a),        static_cast<double>(l.c),
            static_cast<double>(l.f),        static_cast<double>(l.k),
            static_cast<double>(l.s),        static_cast<double>(l.p),
            static_cast<double>(l.rs),       static_cast<double>(l.ds)};
}

// Surrogate extrapolation can stray out of physical range; the identities are
// applied verbatim and such points are reported as-is but kept off fronts,
// references and summaries (see is_physical).
void finish_point(DesignPoint& p) {
    p.energy_mj = p.power_mw * p.latency_s;
    p.perf_per_area = 1.0 / (p.latency_s * p.area_mm2);
}

} // namespace

bool is_physical(const DesignPoint& p) {
    return p.power_mw > 0.0 && p.latency_s > 0.0 && p.area_mm2 > 0.0;
}

namespace {

const PolySurrogate& checked_model(const std::optional<PolySurrogate>& m, int dims,
                                   const char* what, PeType pe) {
    if (!m)
        throw ValidationError(std::string("missing ") + what + " model for pe_type " +
                              to_string(pe));
    if (m->basis.d != dims)
        throw ValidationError(std::string(what) + " model for pe_type " + to_string(pe) +
                              " has feature dimension " + std::to_string(m->basis.d) +
                              ", expected " + std::to_string(dims));
    return *m;
}

} // namespace

DesignPoint evaluate_point(const AcceleratorConfig& cfg, std::uint64_t config_id,
                           const NetworkConfig& net, const CostSource& source) {
    cfg.validate();
    net.validate();
    DesignPoint p;
    p.config_id = config_id;
    p.config = cfg;
    p.net = net.name;
    p.source = source.name();

    if (!source.is_surrogate()) {
        const CostRecord rec = oracle_cost(cfg, net, source.oracle_params());
        p.power_mw = rec.power_mw;
        p.latency_s = rec.latency_s;
        p.area_mm2 = rec.area_mm2;
    } else {
        const SurrogateBundle& b = source.bundle();
        const auto t = static_cast<std::size_t>(cfg.pe_type);
        const PolySurrogate& pm = checked_model(b.power[t], kPowerAreaDims, "power", cfg.pe_type);
        const PolySurrogate& am = checked_model(b.area[t], kPowerAreaDims, "area", cfg.pe_type);
        const PolySurrogate& lm = checked_model(b.latency[t], kLatencyDims, "latency", cfg.pe_type);
        const std::vector<double> pa = power_area_features(cfg);
        p.power_mw = pm.predict(pa);
        p.area_mm2 = am.predict(pa);
        double latency = 0.0;
        for (const LayerShape& l : net.layers) latency += lm.predict(latency_features(cfg, l));
        p.latency_s = latency;
    }
    finish_point(p);
    return p;
}

// --- SweepEvaluator ---------------------------------------------------------

namespace {

constexpr int kMaxFlatDims = 16;
constexpr int kMaxFlatDegree = 15;

void check_flat_limits(const PolySurrogate& model, const char* what) {
    if (model.basis.d >= kMaxFlatDims || model.basis.K > kMaxFlatDegree)
        throw ValidationError(std::string(what) +
                              " model is too large for sweep evaluation (d < 16, K <= 15)");
}

// Multiply-program encoding of a monomial list: term j is the product of
// counts[j] scaled features, whose indices sit consecutively in factors.
struct MonomialProgram {
    std::vector<std::uint8_t> counts;
    std::vector<std::uint8_t> factors;

    void build(const std::vector<std::vector<int>>& exponents) {
        counts.reserve(exponents.size());
        for (const auto& q : exponents) {
            int total = 0;
            for (std::size_t i = 0; i < q.size(); ++i)
                for (int e = 0; e < q[i]; ++e) {
                    factors.push_back(static_cast<std::uint8_t>(i));
                    ++total;
                }
            counts.push_back(static_cast<std::uint8_t>(total));
        }
    }
};

// Allocation-free evaluation of a fitted model over raw features.
struct FlatModel {
    int d = 0;
    std::vector<double> coef;
    std::vector<FeatureScaling> scaling;
    MonomialProgram program;

    void init(const PolySurrogate& model, const char* what) {
        check_flat_limits(model, what);
        d = model.basis.d;
        coef = model.coefficients;
        scaling = model.scaling;
        program.build(model.basis.exponents);
    }

    double eval(const double* raw) const {
        double sf[kMaxFlatDims];
        for (int i = 0; i < d; ++i)
            sf[i] = (raw[i] - scaling[i].shift) * scaling[i].scale;
        double sum = 0.0;
        const std::uint8_t* f = program.factors.data();
        for (std::size_t j = 0; j < coef.size(); ++j) {
            double term = coef[j];
            for (int c = program.counts[j]; c > 0; --c) term *= sf[*f++];
            sum += term;
        }
        return sum;
    }
};

// Factorized form of one latency model: every monomial over the 14 features
// splits into a config-feature monomial times a layer-feature monomial. The
// per-network sums of layer monomials are folded into the coefficients, so a
// (config, net) prediction is a dot product over config sub-basis monomials.
struct FactorizedLatency {
    int K = 0;
    std::size_t n_cfg_terms = 0;
    std::size_t n_nets = 0;
    MonomialProgram cfg_program;
    std::vector<FeatureScaling> scaling;  // full 14-dim scaling
    std::vector<double> net_weights;      // n_nets x n_cfg_terms, row-major

    void build(const PolySurrogate& model, const std::vector<NetworkConfig>& nets) {
        check_flat_limits(model, "latency");
        scaling = model.scaling;
        K = model.basis.K;
        const MonomialBasis cfg_basis = build_basis(kConfigDims, K);
        const MonomialBasis layer_basis = build_basis(kLayerDims, K);
        n_cfg_terms = cfg_basis.size();
        n_nets = nets.size();
        cfg_program.build(cfg_basis.exponents);

        std::map<std::vector<int>, std::size_t> cfg_index, layer_index;
        for (std::size_t i = 0; i < cfg_basis.size(); ++i)
            cfg_index[cfg_basis.exponents[i]] = i;
        for (std::size_t i = 0; i < layer_basis.size(); ++i)
            layer_index[layer_basis.exponents[i]] = i;

        std::vector<std::size_t> term_cfg(model.basis.size());
        std::vector<std::size_t> term_layer(model.basis.size());
        for (std::size_t j = 0; j < model.basis.size(); ++j) {
            const std::vector<int>& q = model.basis.exponents[j];
            term_cfg[j] = cfg_index.at({q.begin(), q.begin() + kConfigDims});
            term_layer[j] = layer_index.at({q.begin() + kConfigDims, q.end()});
        }

        net_weights.assign(n_nets * n_cfg_terms, 0.0);
        std::vector<double> layer_sums(layer_basis.size());
        for (std::size_t ni = 0; ni < nets.size(); ++ni) {
            std::fill(layer_sums.begin(), layer_sums.end(), 0.0);
            for (const LayerShape& l : nets[ni].layers) {
                std::array<double, kLayerDims> sf{};
                const double raw[kLayerDims] = {
                    static_cast<double>(l.a), static_cast<double>(l.c),
                    static_cast<double>(l.f), static_cast<double>(l.k),
                    static_cast<double>(l.s), static_cast<double>(l.p),
                    static_cast<double>(l.rs), static_cast<double>(l.ds)};
                for (int i = 0; i < kLayerDims; ++i) {
                    const FeatureScaling& fs = scaling[kConfigDims + i];
                    sf[i] = (raw[i] - fs.shift) * fs.scale;
                }
                for (std::size_t t = 0; t < layer_basis.size(); ++t) {
                    double v = 1.0;
                    const std::vector<int>& q = layer_basis.exponents[t];
                    for (int i = 0; i < kLayerDims; ++i)
                        for (int e = 0; e < q[i]; ++e) v *= sf[i];
                    layer_sums[t] += v;
                }
            }
            for (std::size_t j = 0; j < model.basis.size(); ++j)
                net_weights[ni * n_cfg_terms + term_cfg[j]] +=
                    model.coefficients[j] * layer_sums[term_layer[j]];
        }
    }

    // Config sub-basis monomials over scaled config features. out must have
    // n_cfg_terms slots.
    void config_monomials(const AcceleratorConfig& cfg, double* out) const {
        const double raw[kConfigDims] = {
            static_cast<double>(cfg.sp_if),   static_cast<double>(cfg.sp_ps),
            static_cast<double>(cfg.sp_fw),   static_cast<double>(cfg.pe_rows),
            static_cast<double>(cfg.pe_cols), static_cast<double>(cfg.glb)};
        double sf[kConfigDims];
        for (int i = 0; i < kConfigDims; ++i)
            sf[i] = (raw[i] - scaling[i].shift) * scaling[i].scale;
        const std::uint8_t* f = cfg_program.factors.data();
        for (std::size_t t = 0; t < n_cfg_terms; ++t) {
            double v = 1.0;
            for (int c = cfg_program.counts[t]; c > 0; --c) v *= sf[*f++];
            out[t] = v;
        }
    }

    double predict(const double* cfg_monomials, std::size_t net_idx) const {
        const double* w = net_weights.data() + net_idx * n_cfg_terms;
        double sum = 0.0;
        for (std::size_t t = 0; t < n_cfg_terms; ++t) sum += cfg_monomials[t] * w[t];
        return sum;
    }
};

} // namespace

struct SweepEvaluator::Impl {
    CostSource source;
    std::vector<NetworkConfig> nets;
    // Surrogate path: allocation-free power/area models plus factorized
    // latency, per PE type present in the bundle.
    std::array<std::optional<FlatModel>, 4> power;
    std::array<std::optional<FlatModel>, 4> area;
    std::array<std::optional<FactorizedLatency>, 4> factorized;

    explicit Impl(CostSource s) : source(std::move(s)) {}
};

SweepEvaluator::SweepEvaluator(const CostSource& source,
                               const std::vector<NetworkConfig>& nets)
    : impl_(std::make_unique<Impl>(source)) {
    if (nets.empty()) throw ValidationError("sweep requires at least one network");
    for (const NetworkConfig& net : nets) net.validate();
    impl_->nets = nets;
    if (source.is_surrogate()) {
        const SurrogateBundle& b = source.bundle();
        for (PeType pe : kAllPeTypes) {
            const auto t = static_cast<std::size_t>(pe);
            if (b.power[t]) {
                impl_->power[t].emplace();
                impl_->power[t]->init(checked_model(b.power[t], kPowerAreaDims,
                                                    "power", pe), "power");
            }
            if (b.area[t]) {
                impl_->area[t].emplace();
                impl_->area[t]->init(checked_model(b.area[t], kPowerAreaDims,
                                                   "area", pe), "area");
            }
            if (b.latency[t]) {
                checked_model(b.latency[t], kLatencyDims, "latency", pe);
                impl_->factorized[t].emplace();
                impl_->factorized[t]->build(*b.latency[t], nets);
            }
        }
    }
}

SweepEvaluator::~SweepEvaluator() = default;
SweepEvaluator::SweepEvaluator(SweepEvaluator&&) noexcept = default;

std::size_t SweepEvaluator::num_nets() const { return impl_->nets.size(); }

namespace {

// All model features: everything except bw.
bool scratch_matches(const MetricsScratch& s, const AcceleratorConfig& cfg) {
    return s.valid && s.pe_type == cfg.pe_type && s.pe_rows == cfg.pe_rows &&
           s.pe_cols == cfg.pe_cols && s.sp_if == cfg.sp_if && s.sp_fw == cfg.sp_fw &&
           s.sp_ps == cfg.sp_ps && s.glb == cfg.glb;
}

void scratch_store(MetricsScratch& s, const AcceleratorConfig& cfg, double power,
                   double area, const double* latency, std::size_t nn) {
    s.valid = true;
    s.pe_type = cfg.pe_type;
    s.pe_rows = cfg.pe_rows;
    s.pe_cols = cfg.pe_cols;
    s.sp_if = cfg.sp_if;
    s.sp_fw = cfg.sp_fw;
    s.sp_ps = cfg.sp_ps;
    s.glb = cfg.glb;
    s.power_mw = power;
    s.area_mm2 = area;
    s.latency_s.assign(latency, latency + nn);
}

} // namespace

void SweepEvaluator::evaluate_config_metrics(const AcceleratorConfig& cfg,
                                             double& power_mw, double& area_mm2,
                                             double* latency_s,
                                             MetricsScratch* scratch) const {
    const std::size_t nn = impl_->nets.size();

    if (!impl_->source.is_surrogate()) {
        // Oracle latency depends on bw (traffic / bw), so only power and area
        // carry over between bw-siblings.
        const OracleParams& params = impl_->source.oracle_params();
        if (scratch && scratch_matches(*scratch, cfg)) {
            power_mw = scratch->power_mw;
            area_mm2 = scratch->area_mm2;
        } else {
            power_mw = oracle_power_mw(cfg, params);
            area_mm2 = oracle_area_mm2(cfg, params);
            if (scratch) scratch_store(*scratch, cfg, power_mw, area_mm2, nullptr, 0);
        }
        for (std::size_t ni = 0; ni < nn; ++ni)
            latency_s[ni] = network_latency_s(cfg, impl_->nets[ni], params);
        return;
    }

    if (scratch && scratch_matches(*scratch, cfg) && scratch->latency_s.size() == nn) {
        power_mw = scratch->power_mw;
        area_mm2 = scratch->area_mm2;
        std::copy(scratch->latency_s.begin(), scratch->latency_s.end(), latency_s);
        return;
    }

    const auto t = static_cast<std::size_t>(cfg.pe_type);
    if (!impl_->power[t] || !impl_->area[t] || !impl_->factorized[t])
        throw ValidationError(std::string("missing surrogate models for pe_type ") +
                              to_string(cfg.pe_type));
    const double raw[kPowerAreaDims] = {
        static_cast<double>(cfg.sp_if), static_cast<double>(cfg.sp_ps),
        static_cast<double>(cfg.sp_fw), static_cast<double>(cfg.num_pe())};
    power_mw = impl_->power[t]->eval(raw);
    area_mm2 = impl_->area[t]->eval(raw);

    const FactorizedLatency& fl = *impl_->factorized[t];
    double monomials[512];
    static_assert(sizeof(monomials) / sizeof(double) >= 462,
                  "config sub-basis up to degree 5 fits the stack buffer");
    if (fl.n_cfg_terms > sizeof(monomials) / sizeof(double))
        throw ValidationError("latency model degree too large for sweep evaluation");
    fl.config_monomials(cfg, monomials);
    for (std::size_t ni = 0; ni < nn; ++ni) latency_s[ni] = fl.predict(monomials, ni);
    if (scratch) scratch_store(*scratch, cfg, power_mw, area_mm2, latency_s, nn);
}

void SweepEvaluator::evaluate_config(const EnumeratedConfig& ec, DesignPoint* out,
                                     MetricsScratch* scratch) const {
    const std::size_t nn = impl_->nets.size();
    double power = 0.0, area = 0.0;
    double latency_buf[64];
    std::vector<double> latency_heap;
    double* latency = latency_buf;
    if (nn > 64) {
        latency_heap.resize(nn);
        latency = latency_heap.data();
    }
    evaluate_config_metrics(ec.config, power, area, latency, scratch);

    const char* source_name = impl_->source.name();
    for (std::size_t ni = 0; ni < nn; ++ni) {
        DesignPoint& p = out[ni];
        p.config_id = ec.id;
        p.config = ec.config;
        p.net = impl_->nets[ni].name;
        p.source = source_name;
        p.power_mw = power;
        p.area_mm2 = area;
        p.latency_s = latency[ni];
        finish_point(p);
    }
}

// --- Pareto -----------------------------------------------------------------

namespace {

// best-first comparison in one dimension
inline bool strictly_better(double a, double b, bool maximize) {
    return maximize ? a > b : a < b;
}

bool dominates(const std::vector<double>& p, const std::vector<double>& q,
               const std::vector<bool>& maximize) {
    bool strict = false;
    for (std::size_t i = 0; i < maximize.size(); ++i) {
        if (strictly_better(q[i], p[i], maximize[i])) return false;
        if (strictly_better(p[i], q[i], maximize[i])) strict = true;
    }
    return strict;
}

} // namespace

std::vector<std::size_t> pareto_front_indices(
    const std::vector<std::vector<double>>& points,
    const std::vector<bool>& maximize) {
    if (points.empty()) throw ValidationError("pareto front of an empty point set");
    const std::size_t m = maximize.size();
    if (m == 0) throw ValidationError("pareto front requires at least one objective");
    for (const auto& p : points)
        if (p.size() != m)
            throw ValidationError("point dimension does not match objective count");

    // Deduplicate identical tuples, keeping the smallest input index.
    std::map<std::vector<double>, std::size_t> representative;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [it, inserted] = representative.try_emplace(points[i], i);
        if (!inserted && i < it->second) it->second = i;
    }
    std::vector<std::size_t> order;
    order.reserve(representative.size());
    for (const auto& [tuple, idx] : representative) order.push_back(idx);

    // Sort best-first lexicographically across objectives; a point can then
    // never dominate one that precedes it.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < m; ++i) {
            if (points[a][i] != points[b][i])
                return strictly_better(points[a][i], points[b][i], maximize[i]);
        }
        return a < b;
    });

    std::vector<std::size_t> front;
    for (std::size_t cand : order) {
        bool dominated = false;
        for (std::size_t member : front) {
            if (dominates(points[member], points[cand], maximize)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(cand);
    }
    return front;
}

double metric_value(const DesignPoint& p, const std::string& metric) {
    if (metric == "power") return p.power_mw;
    if (metric == "latency") return p.latency_s;
    if (metric == "area") return p.area_mm2;
    if (metric == "energy") return p.energy_mj;
    if (metric == "perf_per_area") return p.perf_per_area;
    throw ValidationError("unknown metric \"" + metric + "\"");
}

std::vector<std::size_t> pareto_front(const std::vector<DesignPoint>& points,
                                      const std::vector<Objective>& objectives) {
    if (objectives.empty()) throw ValidationError("pareto front requires objectives");
    std::vector<std::vector<double>> tuples(points.size());
    std::vector<bool> maximize;
    for (const Objective& o : objectives) maximize.push_back(o.maximize);
    for (std::size_t i = 0; i < points.size(); ++i) {
        tuples[i].reserve(objectives.size());
        for (const Objective& o : objectives)
            tuples[i].push_back(metric_value(points[i], o.metric));
    }
    return pareto_front_indices(tuples, maximize);
}

// --- Normalization ----------------------------------------------------------

std::size_t best_int16_reference(const std::vector<DesignPoint>& points) {
    std::size_t best = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].config.pe_type != PeType::INT16 || !is_physical(points[i]))
            continue;
        if (best == points.size()) {
            best = i;
            continue;
        }
        const DesignPoint& b = points[best];
        const DesignPoint& p = points[i];
        if (p.perf_per_area > b.perf_per_area ||
            (p.perf_per_area == b.perf_per_area &&
             std::pair(p.config_id, p.net) < std::pair(b.config_id, b.net)))
            best = i;
    }
    if (best == points.size())
        throw ValidationError("no INT16 point available as normalization reference");
    return best;
}

std::vector<DesignPoint> normalize(const std::vector<DesignPoint>& points,
                                   std::size_t reference_index) {
    if (reference_index >= points.size())
        throw ValidationError("normalization reference index out of range");
    const DesignPoint& ref = points[reference_index];
    std::vector<DesignPoint> out = points;
    for (DesignPoint& p : out) {
        p.power_mw /= ref.power_mw;
        p.latency_s /= ref.latency_s;
        p.area_mm2 /= ref.area_mm2;
        p.energy_mj /= ref.energy_mj;
        p.perf_per_area /= ref.perf_per_area;
    }
    return out;
}

// --- Sweep --------------------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

bool SweepResult::is_point_on_front(std::size_t point_index) const {
    for (const auto& [net, front] : fronts)
        for (std::size_t idx : front)
            if (idx == point_index) return true;
    return false;
}

SweepResult sweep(const ConfigSpaceSpec& space, const std::vector<NetworkConfig>& nets,
                  const CostSource& source, int jobs, bool normalize_summary,
                  bool global_reference) {
    const EnumerationResult enumeration = enumerate_space(space);
    if (enumeration.configs.empty())
        throw ValidationError("design space contains no valid configurations");
    const SweepEvaluator evaluator(source, nets);

    SweepResult result;
    result.skipped = enumeration.skipped;
    for (const NetworkConfig& net : nets) result.net_names.push_back(net.name);

    const std::size_t nn = nets.size();
    result.points.resize(enumeration.configs.size() * nn);
    parallel_chunks(enumeration.configs.size(), jobs,
                    [&](std::size_t begin, std::size_t end) {
                        MetricsScratch scratch;
                        for (std::size_t ci = begin; ci < end; ++ci)
                            evaluator.evaluate_config(enumeration.configs[ci],
                                                      &result.points[ci * nn], &scratch);
                    });

    // Per-net Pareto fronts over (perf_per_area max, energy min), restricted
    // to physically meaningful points.
    const std::vector<bool> maximize = {true, false};
    for (std::size_t ni = 0; ni < nn; ++ni) {
        std::vector<std::vector<double>> tuples;
        std::vector<std::size_t> global;
        tuples.reserve(enumeration.configs.size());
        for (std::size_t ci = 0; ci < enumeration.configs.size(); ++ci) {
            const DesignPoint& p = result.points[ci * nn + ni];
            if (!is_physical(p)) continue;
            tuples.push_back({p.perf_per_area, p.energy_mj});
            global.push_back(ci * nn + ni);
        }
        std::vector<std::size_t> front;
        if (!tuples.empty()) {
            front = pareto_front_indices(tuples, maximize);
            for (std::size_t& idx : front) idx = global[idx];
        }
        result.fronts.emplace_back(nets[ni].name, std::move(front));
    }

    // Distribution summary per (net, pe_type): min/median/max of
    // perf_per_area and energy over physical points, plus normalized variants
    // when requested.
    std::optional<DesignPoint> global_ref;
    if (normalize_summary && global_reference) {
        std::vector<DesignPoint> physical;
        for (const DesignPoint& p : result.points)
            if (is_physical(p)) physical.push_back(p);
        if (physical.empty())
            throw ValidationError("no physical points available for normalization");
        global_ref = physical[best_int16_reference(physical)];
    }
    for (std::size_t ni = 0; ni < nn; ++ni) {
        std::vector<DesignPoint> net_points;
        for (std::size_t ci = 0; ci < enumeration.configs.size(); ++ci) {
            const DesignPoint& p = result.points[ci * nn + ni];
            if (is_physical(p)) net_points.push_back(p);
        }
        if (net_points.empty()) continue;
        std::vector<DesignPoint> normalized;
        if (normalize_summary) {
            if (global_ref) {
                std::vector<DesignPoint> with_ref = net_points;
                with_ref.push_back(*global_ref);
                normalized = normalize(with_ref, with_ref.size() - 1);
                normalized.pop_back();
            } else {
                normalized = normalize(net_points, best_int16_reference(net_points));
            }
        }

        for (PeType pe : kAllPeTypes) {
            std::vector<double> ppa, energy, nppa, nenergy;
            for (std::size_t i = 0; i < net_points.size(); ++i) {
                if (net_points[i].config.pe_type != pe) continue;
                ppa.push_back(net_points[i].perf_per_area);
                energy.push_back(net_points[i].energy_mj);
                if (normalize_summary) {
                    nppa.push_back(normalized[i].perf_per_area);
                    nenergy.push_back(normalized[i].energy_mj);
                }
            }
            if (ppa.empty()) continue;
            auto add = [&](const std::string& metric, const std::vector<double>& v) {
                result.summary.push_back({nets[ni].name, pe, metric,
                                          *std::min_element(v.begin(), v.end()),
                                          median_of(v),
                                          *std::max_element(v.begin(), v.end())});
            };
            add("perf_per_area", ppa);
            add("energy", energy);
            if (normalize_summary) {
                add("norm_perf_per_area", nppa);
                add("norm_energy", nenergy);
            }
        }
    }
    return result;
}

// --- CSV emitters -------------------------------------------------------------

namespace {

const char* kResultsHeader =
    "config_id,pe_type,pe_rows,pe_cols,sp_if,sp_fw,sp_ps,glb,bw,net,"
    "power_mw,latency_s,area_mm2,energy_mj,perf_per_area,source,pareto";

void emit_point(std::ostringstream& out, const DesignPoint& p, bool on_front) {
    const AcceleratorConfig& c = p.config;
    out << p.config_id << ',' << to_string(c.pe_type) << ',' << c.pe_rows << ','
        << c.pe_cols << ',' << c.sp_if << ',' << c.sp_fw << ',' << c.sp_ps << ','
        << c.glb << ',' << c.bw << ',' << p.net << ',' << format_g9(p.power_mw)
        << ',' << format_g9(p.latency_s) << ',' << format_g9(p.area_mm2) << ','
        << format_g9(p.energy_mj) << ',' << format_g9(p.perf_per_area) << ','
        << p.source << ',' << (on_front ? 1 : 0) << '\n';
}

} // namespace

std::string sweep_results_csv(const SweepResult& result) {
    std::vector<char> on_front(result.points.size(), 0);
    for (const auto& [net, front] : result.fronts)
        for (std::size_t idx : front) on_front[idx] = 1;
    std::ostringstream out;
    out << kResultsHeader << '\n';
    for (std::size_t i = 0; i < result.points.size(); ++i)
        emit_point(out, result.points[i], on_front[i] != 0);
    return out.str();
}

std::string sweep_pareto_csv(const SweepResult& result) {
    std::ostringstream out;
    out << kResultsHeader << '\n';
    for (const auto& [net, front] : result.fronts)
        for (std::size_t idx : front) emit_point(out, result.points[idx], true);
    return out.str();
}

std::string sweep_summary_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "net,pe_type,metric,min,median,max\n";
    for (const SummaryRow& row : result.summary)
        out << row.net << ',' << to_string(row.pe_type) << ',' << row.metric << ','
            << format_g9(row.min) << ',' << format_g9(row.median) << ','
            << format_g9(row.max) << '\n';
    return out.str();
}

} // namespace qadse
