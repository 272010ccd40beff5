// space.hpp
//
// The accelerator design space: per-knob candidate lists whose Cartesian
// product (in fixed odometer order, last knob fastest) enumerates candidate
// AcceleratorConfigs. Combinations violating config invariants are skipped
// and counted; a config's id is its position in the raw Cartesian product,
// so ids are stable regardless of how many combinations get skipped.

#ifndef QADSE_SPACE_HPP
#define QADSE_SPACE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qadse/model.hpp"

namespace qadse {

struct ConfigSpaceSpec {
    std::vector<PeType> pe_types;
    std::vector<int> pe_rows;
    std::vector<int> pe_cols;
    std::vector<std::int64_t> sp_if;
    std::vector<std::int64_t> sp_fw;
    std::vector<std::int64_t> sp_ps;
    std::vector<std::int64_t> glb;
    std::vector<std::int64_t> bw;

    // Product of list lengths (including combos that will be skipped).
    std::uint64_t cartesian_size() const;
    void validate() const;
};

ConfigSpaceSpec parse_space(const std::string& text);
std::string serialize(const ConfigSpaceSpec& spec);

struct EnumeratedConfig {
    std::uint64_t id = 0;      // position in the raw Cartesian product
    AcceleratorConfig config;
};

struct EnumerationResult {
    std::vector<EnumeratedConfig> configs;
    std::uint64_t skipped = 0; // combos violating AcceleratorConfig invariants
};

// Knob order (slowest to fastest): pe_type, pe_rows, pe_cols, sp_if, sp_fw,
// sp_ps, glb, bw.
EnumerationResult enumerate_space(const ConfigSpaceSpec& spec);

} // namespace qadse

#endif
