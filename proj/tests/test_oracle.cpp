#include <doctest.h>

#include <cmath>
#include <sstream>
#include <tuple>

#include "qadse/oracle.hpp"
#include "qadse/rng.hpp"

using namespace qadse;

namespace {

AcceleratorConfig make_config(PeType pe, int rows, int cols, std::int64_t sp_if,
                              std::int64_t sp_fw, std::int64_t sp_ps,
                              std::int64_t glb, std::int64_t bw) {
    AcceleratorConfig cfg{pe, rows, cols, sp_if, sp_fw, sp_ps, glb, bw};
    cfg.validate();
    return cfg;
}

// Scratchpads and bandwidth large enough that compute dominates.
AcceleratorConfig roomy(PeType pe, int rows, int cols) {
    return make_config(pe, rows, cols, 1 << 20, 1 << 20, 1 << 20, 1 << 26, 1 << 24);
}

AcceleratorConfig random_config(Rng& rng, PeType pe) {
    const int rows = 1 + static_cast<int>(rng.bounded(16));
    const int cols = 1 + static_cast<int>(rng.bounded(16));
    const std::int64_t sp_if = 32 << rng.bounded(5);
    const std::int64_t sp_fw = 32 << rng.bounded(5);
    const std::int64_t sp_ps = 16 << rng.bounded(5);
    const std::int64_t glb = 1 << (14 + rng.bounded(4));
    const std::int64_t bw = 8 << rng.bounded(4);
    return make_config(pe, rows, cols, sp_if, sp_fw, sp_ps, glb, bw);
}

LayerShape random_layer(Rng& rng) {
    LayerShape l;
    l.a = 4 + static_cast<int>(rng.bounded(60));
    l.c = 1 + static_cast<int>(rng.bounded(64));
    l.f = 1 + static_cast<int>(rng.bounded(64));
    l.k = 1 + static_cast<int>(rng.bounded(5));
    l.s = 1 + static_cast<int>(rng.bounded(2));
    l.p = static_cast<int>(rng.bounded(3));
    if (l.a + 2 * l.p < l.k) l.p = l.k; // keep valid
    return l;
}

} // namespace

TEST_CASE("layer_macs") {
    CHECK(layer_macs({1, 1, 1, 1, 1, 0}) == 1);
    CHECK(layer_macs({8, 1, 1, 3, 1, 0}) == 324);      // E=6; 36*9
    CHECK(layer_macs({8, 16, 32, 3, 1, 0}) == 165888); // 324*16*32
}

TEST_CASE("layer_cycles closed form") {
    const OracleParams params = OracleParams::defaults();

    SUBCASE("compute-bound example: folds=2, 22 cycles") {
        const LayerShape layer{8, 1, 1, 3, 1, 0};
        CHECK(layer_cycles(roomy(PeType::INT16, 4, 4), layer, params) == 22.0);
    }
    SUBCASE("one MAC on one PE takes one cycle") {
        CHECK(layer_cycles(roomy(PeType::INT16, 1, 1), {1, 1, 1, 1, 1, 0}, params) == 1.0);
    }
    SUBCASE("rs adds one skip unit, ds adds two") {
        const AcceleratorConfig cfg = make_config(PeType::INT16, 4, 4, 256, 512, 128,
                                                  65536, 32);
        LayerShape base{16, 8, 8, 3, 1, 1};
        const double plain = layer_cycles(cfg, base, params);
        const double e = output_dim(base);
        const double unit =
            std::ceil(2.0 * e * e * base.f * activation_bytes(cfg.pe_type) /
                      static_cast<double>(cfg.bw));
        LayerShape with_rs = base;
        with_rs.rs = 1;
        CHECK(layer_cycles(cfg, with_rs, params) == plain + unit);
        LayerShape with_ds = base;
        with_ds.ds = 1;
        CHECK(layer_cycles(cfg, with_ds, params) == plain + 2.0 * unit);
    }
    SUBCASE("spill factor doubles traffic when the layer exceeds glb") {
        // footprint: 64*64*8*2 = 65536 > glb = 4096 for INT16
        const AcceleratorConfig cfg = make_config(PeType::INT16, 4, 4, 64, 64, 64,
                                                  4096, 8);
        const LayerShape big{64, 8, 8, 3, 1, 1};
        OracleParams no_spill = params;
        no_spill.spill_factor = 1.0;
        const double base = layer_cycles(cfg, big, no_spill);
        const double spilled = layer_cycles(cfg, big, params);
        CHECK(spilled > base); // memory-bound layer, doubled traffic
    }
}

TEST_CASE("network latency sums cycles over the clock") {
    const OracleParams params = OracleParams::defaults();
    NetworkConfig net{"one", {{8, 1, 1, 3, 1, 0}}};

    const double lat16 = network_latency_s(roomy(PeType::INT16, 4, 4), net, params);
    CHECK(lat16 == doctest::Approx(22.0 / 285e6).epsilon(1e-12));

    const double lat1 = network_latency_s(roomy(PeType::LightPE1, 4, 4), net, params);
    CHECK(lat1 == doctest::Approx(22.0 / 455e6).epsilon(1e-12));
    CHECK(lat1 < lat16);
}

TEST_CASE("oracle power and area closed forms") {
    const OracleParams params = OracleParams::defaults();
    const AcceleratorConfig cfg = make_config(PeType::INT16, 4, 4, 256, 512, 256,
                                              65536, 32);
    // Hand-evaluated from the shipped defaults: sp total 1024 B, 16 PEs.
    CHECK(oracle_power_mw(cfg, params) == doctest::Approx(42.290176).epsilon(1e-12));
    CHECK(oracle_area_mm2(cfg, params) == doctest::Approx(0.24623616).epsilon(1e-12));

    SUBCASE("doubling #PE doubles the per-PE term") {
        const AcceleratorConfig twice = make_config(PeType::INT16, 8, 4, 256, 512, 256,
                                                    65536, 32);
        const double glb_term = params.glb_power_mw_per_byte * 65536.0;
        CHECK(oracle_power_mw(twice, params) - glb_term ==
              doctest::Approx(2.0 * (oracle_power_mw(cfg, params) - glb_term)));
    }
}

TEST_CASE("oracle cost record ties the pieces together") {
    const OracleParams params = OracleParams::defaults();
    const AcceleratorConfig cfg = make_config(PeType::LightPE2, 4, 4, 256, 512, 128,
                                              65536, 32);
    const NetworkConfig net{"two", {{16, 3, 8, 3, 1, 1}, {16, 8, 8, 3, 1, 1}}};
    const CostRecord rec = oracle_cost(cfg, net, params);
    CHECK(rec.cycles_per_layer.size() == 2);
    CHECK(rec.energy_mj == rec.power_mw * rec.latency_s);
    CHECK(rec.latency_s ==
          doctest::Approx((rec.cycles_per_layer[0] + rec.cycles_per_layer[1]) /
                          params.of(PeType::LightPE2).clock_hz));
}

TEST_CASE("pe type orderings at fixed shape") {
    const OracleParams params = OracleParams::defaults();
    Rng rng(33);
    const NetworkConfig net{"n", {{16, 3, 8, 3, 1, 1}, {8, 8, 16, 3, 2, 1, 0, 1}}};
    for (int trial = 0; trial < 50; ++trial) {
        const AcceleratorConfig base = random_config(rng, PeType::FP32);
        // Walking LightPE1 -> LightPE2 -> INT16 -> FP32, power, area and
        // latency all increase strictly.
        double prev_power = 0, prev_area = 0, prev_latency = 0;
        int step = 0;
        for (PeType pe : {PeType::LightPE1, PeType::LightPE2, PeType::INT16,
                          PeType::FP32}) {
            AcceleratorConfig cfg = base;
            cfg.pe_type = pe;
            const double power = oracle_power_mw(cfg, params);
            const double area = oracle_area_mm2(cfg, params);
            const double latency = network_latency_s(cfg, net, params);
            if (step > 0) {
                CHECK(power > prev_power);
                CHECK(area > prev_area);
                CHECK(latency > prev_latency);
            }
            prev_power = power;
            prev_area = area;
            prev_latency = latency;
            ++step;
        }
    }
}

TEST_CASE("latency monotonicity in array, bandwidth and scratchpad knobs") {
    const OracleParams params = OracleParams::defaults();
    Rng rng(55);
    // Growing the array can shift the fold count while the active-PE cap
    // K*E binds, which lets the compute term wobble upward by less than one
    // cycle per fold; anything beyond that slack is a bug. Bandwidth and
    // scratchpad growth never increase cycles.
    auto folds_of = [](const AcceleratorConfig& cfg, const LayerShape& l) {
        return std::ceil(static_cast<double>(l.k) / cfg.pe_rows) *
               std::ceil(static_cast<double>(output_dim(l)) / cfg.pe_cols);
    };
    for (int trial = 0; trial < 200; ++trial) {
        const AcceleratorConfig cfg = random_config(
            rng, kAllPeTypes[static_cast<std::size_t>(rng.bounded(4))]);
        const LayerShape layer = random_layer(rng);
        const double base = layer_cycles(cfg, layer, params);

        AcceleratorConfig more_rows = cfg;
        more_rows.pe_rows += 1 + static_cast<int>(rng.bounded(4));
        CHECK(layer_cycles(more_rows, layer, params) <=
              base + folds_of(more_rows, layer));

        AcceleratorConfig more_cols = cfg;
        more_cols.pe_cols += 1 + static_cast<int>(rng.bounded(4));
        CHECK(layer_cycles(more_cols, layer, params) <=
              base + folds_of(more_cols, layer));

        AcceleratorConfig more_bw = cfg;
        more_bw.bw *= 2;
        CHECK(layer_cycles(more_bw, layer, params) <= base);

        AcceleratorConfig more_sp = cfg;
        more_sp.sp_if *= 2;
        more_sp.sp_fw *= 2;
        more_sp.sp_ps *= 2;
        more_sp.glb = std::max<std::int64_t>(
            more_sp.glb, more_sp.sp_if + more_sp.sp_fw + more_sp.sp_ps);
        CHECK(layer_cycles(more_sp, layer, params) <= base);
    }
}

TEST_CASE("power and area strictly increase in #PE, scratchpads and glb") {
    const OracleParams params = OracleParams::defaults();
    Rng rng(56);
    for (int trial = 0; trial < 100; ++trial) {
        const AcceleratorConfig cfg = random_config(
            rng, kAllPeTypes[static_cast<std::size_t>(rng.bounded(4))]);
        AcceleratorConfig more = cfg;
        more.pe_rows += 1;
        CHECK(oracle_power_mw(more, params) > oracle_power_mw(cfg, params));
        CHECK(oracle_area_mm2(more, params) > oracle_area_mm2(cfg, params));
        more = cfg;
        more.sp_ps += 64;
        more.glb += 64;
        CHECK(oracle_power_mw(more, params) > oracle_power_mw(cfg, params));
        CHECK(oracle_area_mm2(more, params) > oracle_area_mm2(cfg, params));
        more = cfg;
        more.glb *= 2;
        CHECK(oracle_power_mw(more, params) > oracle_power_mw(cfg, params));
        CHECK(oracle_area_mm2(more, params) > oracle_area_mm2(cfg, params));
    }
}

TEST_CASE("smooth mode equals ceil mode when every ceil argument is an integer") {
    OracleParams exact = OracleParams::defaults();
    OracleParams smooth = exact;
    smooth.smooth = true;
    // Engineered so folds, per-fold MACs, refill counts and traffic/bw are
    // all integral: INT16 (b_a = b_w = b_ps = 2).
    const AcceleratorConfig cfg = make_config(PeType::INT16, 1, 4, 8, 2, 8, 4096, 2);
    const LayerShape layer{4, 1, 1, 1, 1, 0}; // E=4, macs=16
    const double c_exact = layer_cycles(cfg, layer, exact);
    const double c_smooth = layer_cycles(cfg, layer, smooth);
    CHECK(c_exact == c_smooth);

    SUBCASE("smooth mode never exceeds ceil mode (up to rounding)") {
        Rng rng(77);
        for (int trial = 0; trial < 100; ++trial) {
            const AcceleratorConfig rc = random_config(
                rng, kAllPeTypes[static_cast<std::size_t>(rng.bounded(4))]);
            const LayerShape rl = random_layer(rng);
            const double c = layer_cycles(rc, rl, exact);
            CHECK(layer_cycles(rc, rl, smooth) <= c * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("oracle params validation and round trip") {
    const OracleParams params = OracleParams::defaults();
    params.validate();
    CHECK(params.of(PeType::FP32).clock_hz == 275e6);
    CHECK(params.of(PeType::INT16).clock_hz == 285e6);
    CHECK(params.of(PeType::LightPE2).clock_hz == 435e6);
    CHECK(params.of(PeType::LightPE1).clock_hz == 455e6);

    const OracleParams loaded = load_oracle_params(serialize(params));
    CHECK(loaded.of(PeType::LightPE1).pe_power_mw ==
          params.of(PeType::LightPE1).pe_power_mw);
    CHECK(loaded.spill_factor == params.spill_factor);

    OracleParams bad = params;
    bad.pe[static_cast<int>(PeType::FP32)].pe_power_mw = 0.1; // breaks ordering
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("dataset generation") {
    ConfigSpaceSpec space;
    space.pe_types = {PeType::INT16};
    space.pe_rows = {2, 4};
    space.pe_cols = {2, 4};
    space.sp_if = {64, 128};
    space.sp_fw = {128};
    space.sp_ps = {32};
    space.glb = {16384};
    space.bw = {16};
    const std::vector<NetworkConfig> nets = {
        {"a", {{8, 3, 4, 3, 1, 1}, {8, 4, 4, 3, 1, 1}}},
        {"b", {{16, 3, 8, 3, 1, 1}}},
    };
    const OracleParams params = OracleParams::defaults();

    auto generate = [&](std::uint64_t seed) {
        std::ostringstream power, area, latency;
        DatasetSinks sinks;
        const auto t = static_cast<std::size_t>(PeType::INT16);
        sinks.power[t] = &power;
        sinks.area[t] = &area;
        sinks.latency[t] = &latency;
        const DatasetStats stats = gen_dataset(space, nets, params, seed, {}, sinks);
        return std::make_tuple(power.str(), area.str(), latency.str(), stats);
    };

    const auto [power, area, latency, stats] = generate(7);
    CHECK(stats.configs_used == 8);
    CHECK(stats.latency_rows[static_cast<std::size_t>(PeType::INT16)] == 8 * 3);

    // Header schemas: 4 features for power/area, 14 for latency.
    CHECK(power.substr(0, power.find('\n')) == "sp_if,sp_ps,sp_fw,n_pe,target");
    CHECK(latency.substr(0, latency.find('\n')) ==
          "sp_if,sp_ps,sp_fw,pe_rows,pe_cols,glb,a,c,f,k,s,p,rs,ds,target");

    SUBCASE("same seed reproduces identical bytes") {
        const auto [p2, a2, l2, s2] = generate(7);
        CHECK(p2 == power);
        CHECK(a2 == area);
        CHECK(l2 == latency);
    }
    SUBCASE("empty inputs are rejected") {
        std::ostringstream sink;
        DatasetSinks sinks;
        CHECK_THROWS_AS(gen_dataset(space, {}, params, 0, {}, sinks), ValidationError);
    }
    SUBCASE("max_configs subsamples deterministically") {
        std::ostringstream power_a, power_b;
        DatasetSinks sa, sb;
        const auto t = static_cast<std::size_t>(PeType::INT16);
        sa.power[t] = &power_a;
        sb.power[t] = &power_b;
        const DatasetStats st_a = gen_dataset(space, nets, params, 11, 3, sa);
        const DatasetStats st_b = gen_dataset(space, nets, params, 11, 3, sb);
        CHECK(st_a.configs_used == 3);
        CHECK(power_a.str() == power_b.str());
    }
}
