#include "qadse/coexplore.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qadse/parallel.hpp"
#include "qadse/rng.hpp"

namespace qadse {

ArchSpace ArchSpace::default_space() {
    ArchSpace s;
    s.blocks = {
        {{1, 2}, {40, 48, 56, 64}},
        {{1, 2}, {80, 96, 112, 128}},
        {{1, 2, 3}, {160, 192, 224, 256}},
        {{1, 2, 3}, {320, 384, 448, 512}},
        {{1, 2, 3}, {320, 384, 448, 512}},
    };
    return s;
}

void ArchSpace::validate() const {
    if (blocks.empty()) throw ValidationError("arch space has no blocks");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].repetitions.empty() || blocks[b].channels.empty())
            throw ValidationError("arch space block " + std::to_string(b) +
                                  " has an empty choice list");
        for (int r : blocks[b].repetitions)
            if (r < 1)
                throw ValidationError("arch space block " + std::to_string(b) +
                                      " has a repetition count < 1");
        for (int c : blocks[b].channels)
            if (c < 1)
                throw ValidationError("arch space block " + std::to_string(b) +
                                      " has a channel count < 1");
    }
}

std::uint64_t ArchSpace::size() const {
    validate();
    std::uint64_t n = 1;
    for (const ArchBlock& b : blocks)
        n *= static_cast<std::uint64_t>(b.repetitions.size()) * b.channels.size();
    return n;
}

std::uint64_t space_size(const ArchSpace& space) { return space.size(); }

ArchChoice arch_from_index(const ArchSpace& space, std::uint64_t index) {
    if (index >= space.size())
        throw ValidationError("arch index " + std::to_string(index) +
                              " out of range (space size " +
                              std::to_string(space.size()) + ")");
    // Decode the mixed-radix digits, last digit fastest.
    ArchChoice choice;
    choice.index = index;
    choice.reps.resize(space.blocks.size());
    choice.channels.resize(space.blocks.size());
    std::uint64_t rest = index;
    for (std::size_t b = space.blocks.size(); b-- > 0;) {
        const ArchBlock& blk = space.blocks[b];
        const std::uint64_t cn = blk.channels.size();
        const std::uint64_t rn = blk.repetitions.size();
        choice.channels[b] = blk.channels[static_cast<std::size_t>(rest % cn)];
        rest /= cn;
        choice.reps[b] = blk.repetitions[static_cast<std::size_t>(rest % rn)];
        rest /= rn;
    }
    return choice;
}

std::uint64_t arch_index(const ArchSpace& space, const ArchChoice& choice) {
    if (choice.reps.size() != space.blocks.size() ||
        choice.channels.size() != space.blocks.size())
        throw ValidationError("arch choice block count does not match space");
    std::uint64_t index = 0;
    for (std::size_t b = 0; b < space.blocks.size(); ++b) {
        const ArchBlock& blk = space.blocks[b];
        const auto rit = std::find(blk.repetitions.begin(), blk.repetitions.end(),
                                   choice.reps[b]);
        const auto cit = std::find(blk.channels.begin(), blk.channels.end(),
                                   choice.channels[b]);
        if (rit == blk.repetitions.end())
            throw ValidationError("arch choice repetition " +
                                  std::to_string(choice.reps[b]) +
                                  " not in block " + std::to_string(b));
        if (cit == blk.channels.end())
            throw ValidationError("arch choice channels " +
                                  std::to_string(choice.channels[b]) +
                                  " not in block " + std::to_string(b));
        index = index * blk.repetitions.size() +
                static_cast<std::uint64_t>(rit - blk.repetitions.begin());
        index = index * blk.channels.size() +
                static_cast<std::uint64_t>(cit - blk.channels.begin());
    }
    return index;
}

std::vector<ArchChoice> sample_archs(const ArchSpace& space, std::uint64_t n,
                                     std::uint64_t seed) {
    const std::uint64_t total = space.size();
    if (n > total)
        throw ValidationError("cannot sample " + std::to_string(n) +
                              " architectures from a space of " +
                              std::to_string(total));
    std::vector<std::uint64_t> indices;
    if (n == total) {
        indices.resize(static_cast<std::size_t>(total));
        for (std::uint64_t i = 0; i < total; ++i)
            indices[static_cast<std::size_t>(i)] = i;
    } else {
        Rng rng(seed);
        std::set<std::uint64_t> picked;
        while (picked.size() < n) picked.insert(rng.bounded(total));
        indices.assign(picked.begin(), picked.end());
    }
    std::vector<ArchChoice> out;
    out.reserve(indices.size());
    for (std::uint64_t idx : indices) out.push_back(arch_from_index(space, idx));
    return out;
}

NetworkConfig expand(const ArchChoice& choice, int input_a) {
    if (choice.reps.size() != choice.channels.size() || choice.reps.empty())
        throw ValidationError("arch choice is empty or inconsistent");
    if (input_a < 1) throw ValidationError("input_a must be positive");

    NetworkConfig net;
    net.name = "arch_" + std::to_string(choice.index);
    int a = input_a;
    int in_channels = 3;
    for (std::size_t b = 0; b < choice.reps.size(); ++b) {
        if (a < 1)
            throw ValidationError("feature map underflow: input_a = " +
                                  std::to_string(input_a) + " is too small for " +
                                  std::to_string(choice.reps.size()) + " pooled blocks");
        for (int r = 0; r < choice.reps[b]; ++r) {
            net.layers.push_back(LayerShape{a, in_channels, choice.channels[b],
                                            3, 1, 1, 0, 0});
            in_channels = choice.channels[b];
        }
        a /= 2; // pool between blocks
    }
    net.validate();
    return net;
}

AccuracyProvider AccuracyProvider::synthetic(SyntheticAccuracyParams params) {
    AccuracyProvider p;
    p.synthetic_ = true;
    p.params_ = params;
    return p;
}

AccuracyProvider AccuracyProvider::from_table_csv(const std::string& csv_text) {
    AccuracyProvider p;
    p.synthetic_ = false;
    std::istringstream in(csv_text);
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("arch_index", 0) == 0) continue; // header
        }
        std::istringstream fields(line);
        std::string idx_s, pe_s, top1_s;
        if (!std::getline(fields, idx_s, ',') || !std::getline(fields, pe_s, ',') ||
            !std::getline(fields, top1_s))
            throw ValidationError("accuracy table line " + std::to_string(line_no) +
                                  ": expected arch_index,pe_type,top1_percent");
        try {
            const std::uint64_t idx = std::stoull(idx_s);
            const PeType pe = pe_type_from_string(pe_s);
            const double top1 = std::stod(top1_s);
            if (top1 <= 0.0 || top1 >= 100.0)
                throw ValidationError("accuracy table line " + std::to_string(line_no) +
                                      ": top1 must lie in (0, 100)");
            p.table_[{idx, pe}] = top1;
        } catch (const std::invalid_argument&) {
            throw ValidationError("accuracy table line " + std::to_string(line_no) +
                                  ": malformed number");
        }
    }
    if (p.table_.empty()) throw ValidationError("accuracy table is empty");
    return p;
}

double AccuracyProvider::top1(const ArchChoice& choice, PeType pe) const {
    if (!synthetic_) {
        const auto it = table_.find({choice.index, pe});
        if (it == table_.end())
            throw ValidationError("accuracy table has no entry for arch " +
                                  std::to_string(choice.index) + " with pe_type " +
                                  to_string(pe));
        return it->second;
    }
    // Monotone saturating curve over channel-weighted depth, minus a
    // per-PE-type quantization penalty.
    double depth = 0.0;
    for (std::size_t b = 0; b < choice.reps.size(); ++b)
        depth += choice.reps[b] * std::log2(static_cast<double>(choice.channels[b]));
    const double acc = params_.top1_max - params_.span * std::exp(-depth / params_.tau) -
                       params_.pe_penalty[static_cast<std::size_t>(pe)];
    if (acc <= 0.0 || acc >= 100.0)
        throw ValidationError("synthetic accuracy parameters produce top1 outside (0,100)");
    return acc;
}

CoexploreResult coexplore(const ArchSpace& space, const ConfigSpaceSpec& cfg_space,
                          std::uint64_t n_archs, std::uint64_t n_cfgs,
                          const AccuracyProvider& provider, const CostSource& source,
                          std::uint64_t seed, int jobs, int input_a) {
    if (n_archs == 0) throw ValidationError("n_archs must be positive");
    Rng rng(seed);
    const std::uint64_t arch_seed = rng.fork();
    const std::uint64_t cfg_seed = rng.fork();

    CoexploreResult result;
    result.archs = sample_archs(space, n_archs, arch_seed);

    EnumerationResult enumeration = enumerate_space(cfg_space);
    if (enumeration.configs.empty())
        throw ValidationError("config space contains no valid configurations");
    if (n_cfgs > 0 && n_cfgs < enumeration.configs.size()) {
        Rng cfg_rng(cfg_seed);
        std::vector<std::size_t> idx(enumeration.configs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        cfg_rng.shuffle(idx);
        idx.resize(static_cast<std::size_t>(n_cfgs));
        std::sort(idx.begin(), idx.end());
        for (std::size_t i : idx) result.configs.push_back(enumeration.configs[i]);
    } else {
        result.configs = std::move(enumeration.configs);
    }

    std::vector<NetworkConfig> nets;
    nets.reserve(result.archs.size());
    for (const ArchChoice& arch : result.archs) nets.push_back(expand(arch, input_a));

    const SweepEvaluator evaluator(source, nets);
    const std::size_t na = result.archs.size();
    result.points.resize(result.configs.size() * na);
    result.top1.resize(result.points.size());

    parallel_chunks(result.configs.size(), jobs,
                    [&](std::size_t begin, std::size_t end) {
                        MetricsScratch scratch;
                        for (std::size_t ci = begin; ci < end; ++ci)
                            evaluator.evaluate_config(result.configs[ci],
                                                      &result.points[ci * na], &scratch);
                    });

    for (std::size_t ci = 0; ci < result.configs.size(); ++ci)
        for (std::size_t ai = 0; ai < na; ++ai)
            result.top1[ci * na + ai] =
                provider.top1(result.archs[ai], result.configs[ci].config.pe_type);

    // References: the minimum-energy and minimum-area pairs in the INT16
    // design space (ties by smallest (config_id, arch index)).
    std::size_t ref_energy = result.points.size();
    std::size_t ref_area = result.points.size();
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        if (result.points[i].config.pe_type != PeType::INT16 ||
            !is_physical(result.points[i]))
            continue;
        if (ref_energy == result.points.size() ||
            result.points[i].energy_mj < result.points[ref_energy].energy_mj)
            ref_energy = i;
        if (ref_area == result.points.size() ||
            result.points[i].area_mm2 < result.points[ref_area].area_mm2)
            ref_area = i;
    }
    if (ref_energy == result.points.size())
        throw ValidationError(
            "co-exploration requires a physically valid INT16 point for "
            "normalization; if evaluating with surrogates, check that the models "
            "were characterized on workloads shaped like the sampled architectures");

    result.norm_energy.resize(result.points.size());
    result.norm_area.resize(result.points.size());
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        result.norm_energy[i] =
            result.points[i].energy_mj / result.points[ref_energy].energy_mj;
        result.norm_area[i] = result.points[i].area_mm2 / result.points[ref_area].area_mm2;
    }

    // Joint fronts over physical points: (energy min, top1 error min) and
    // (area min, top1 error min).
    std::vector<std::vector<double>> energy_tuples, area_tuples;
    std::vector<std::size_t> global;
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        if (!is_physical(result.points[i])) continue;
        const double err = 100.0 - result.top1[i];
        energy_tuples.push_back({result.points[i].energy_mj, err});
        area_tuples.push_back({result.points[i].area_mm2, err});
        global.push_back(i);
    }
    if (!global.empty()) {
        const std::vector<bool> minimize = {false, false};
        result.front_energy = pareto_front_indices(energy_tuples, minimize);
        result.front_area = pareto_front_indices(area_tuples, minimize);
        for (std::size_t& idx : result.front_energy) idx = global[idx];
        for (std::size_t& idx : result.front_area) idx = global[idx];
    }
    return result;
}

std::string coexplore_results_csv(const CoexploreResult& result) {
    std::ostringstream out;
    out << "arch_index";
    const std::size_t nblocks = result.archs.empty() ? 0 : result.archs[0].reps.size();
    for (std::size_t b = 1; b <= nblocks; ++b)
        out << ",r" << b << ",ch" << b;
    out << ",config_id,pe_type,power_mw,latency_s,area_mm2,energy_mj,"
           "perf_per_area,norm_energy,norm_area,top1_percent,"
           "pareto_energy,pareto_area\n";

    std::vector<char> on_energy(result.points.size(), 0), on_area(result.points.size(), 0);
    for (std::size_t i : result.front_energy) on_energy[i] = 1;
    for (std::size_t i : result.front_area) on_area[i] = 1;

    const std::size_t na = result.archs.size();
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const ArchChoice& arch = result.archs[i % na];
        const DesignPoint& p = result.points[i];
        out << arch.index;
        for (std::size_t b = 0; b < nblocks; ++b)
            out << ',' << arch.reps[b] << ',' << arch.channels[b];
        out << ',' << p.config_id << ',' << to_string(p.config.pe_type) << ','
            << format_g9(p.power_mw) << ',' << format_g9(p.latency_s) << ','
            << format_g9(p.area_mm2) << ',' << format_g9(p.energy_mj) << ','
            << format_g9(p.perf_per_area) << ',' << format_g9(result.norm_energy[i])
            << ',' << format_g9(result.norm_area[i]) << ','
            << format_g9(result.top1[i]) << ',' << int(on_energy[i]) << ','
            << int(on_area[i]) << '\n';
    }
    return out.str();
}

} // namespace qadse
