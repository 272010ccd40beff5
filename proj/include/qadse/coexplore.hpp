// coexplore.hpp
//
// Joint accelerator / neural-architecture exploration over a VGG-derived
// block search space: each block picks a repetition count and a channel
// width, pools between blocks halve the feature map, and the maximal choice
// expands to the VGG-16 conv stack. Accuracy is injected through a provider
// (synthetic demo curve or an externally measured table), never predicted
// here.

#ifndef QADSE_COEXPLORE_HPP
#define QADSE_COEXPLORE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qadse/explorer.hpp"
#include "qadse/model.hpp"
#include "qadse/space.hpp"

namespace qadse {

struct ArchBlock {
    std::vector<int> repetitions;
    std::vector<int> channels;
};

struct ArchSpace {
    std::vector<ArchBlock> blocks;

    // Two blocks with repetitions {1,2}, three with {1,2,3}; channel menus
    // 40..64, 80..128, 160..256, 320..512, 320..512. 110,592 architectures.
    static ArchSpace default_space();

    std::uint64_t size() const;
    void validate() const;
};

struct ArchChoice {
    std::uint64_t index = 0;   // mixed-radix encoding, block-major,
                               // repetitions before channels, last digit fastest
    std::vector<int> reps;     // per block
    std::vector<int> channels; // per block

    bool operator==(const ArchChoice&) const = default;
};

std::uint64_t space_size(const ArchSpace& space);
ArchChoice arch_from_index(const ArchSpace& space, std::uint64_t index);
std::uint64_t arch_index(const ArchSpace& space, const ArchChoice& choice);

// Uniform sample of n distinct architectures, returned sorted by index;
// n == size() enumerates the whole space. Deterministic per seed.
std::vector<ArchChoice> sample_archs(const ArchSpace& space, std::uint64_t n,
                                     std::uint64_t seed);

// Conv layers with k=3, s=1, p=1 (shape preserving); channels per block;
// the feature map halves after each block's pool; first conv takes 3 input
// channels. Throws if the input size underflows across pools.
NetworkConfig expand(const ArchChoice& choice, int input_a);

struct SyntheticAccuracyParams {
    double top1_max = 94.6;
    double span = 25.0;
    double tau = 30.0;
    // Ordered FP32 = INT16 >= LightPE2 >= LightPE1 (accuracy penalty in points).
    std::array<double, 4> pe_penalty = {0.0, 0.0, 0.15, 0.45};
};

// Accuracy injection point. Synthetic mode is a documented monotone
// saturating curve over channel-weighted depth, for demos and tests only;
// table mode serves externally measured accuracies keyed by
// (arch_index, pe_type) and errors on misses.
class AccuracyProvider {
public:
    static AccuracyProvider synthetic(SyntheticAccuracyParams params = {});
    // CSV columns: arch_index,pe_type,top1_percent
    static AccuracyProvider from_table_csv(const std::string& csv_text);

    double top1(const ArchChoice& choice, PeType pe) const;

private:
    AccuracyProvider() = default;
    bool synthetic_ = true;
    SyntheticAccuracyParams params_;
    std::map<std::pair<std::uint64_t, PeType>, double> table_;
};

struct CoexploreResult {
    std::vector<ArchChoice> archs;
    std::vector<EnumeratedConfig> configs;
    std::vector<DesignPoint> points;   // config-major: points[ci * archs + ai]
    std::vector<double> top1;          // per point
    std::vector<double> norm_energy;   // vs the minimum-energy INT16 pair
    std::vector<double> norm_area;     // vs the minimum-area INT16 pair
    std::vector<std::size_t> front_energy; // (energy min, top1 error min)
    std::vector<std::size_t> front_area;   // (area min, top1 error min)
};

// Evaluates every (sampled config, sampled arch) pair. n_cfgs limits the
// number of accelerator configs drawn (without replacement) from the space;
// 0 means all valid configs.
CoexploreResult coexplore(const ArchSpace& space, const ConfigSpaceSpec& cfg_space,
                          std::uint64_t n_archs, std::uint64_t n_cfgs,
                          const AccuracyProvider& provider, const CostSource& source,
                          std::uint64_t seed, int jobs, int input_a = 32);

std::string coexplore_results_csv(const CoexploreResult& result);

} // namespace qadse

#endif
