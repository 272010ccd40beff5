// model.hpp
//
// Domain types for the accelerator and network configuration space:
// processing-element types, the eight hardware knobs of a spatial-array
// accelerator, and conv-layer / network geometry. All types are immutable
// value types once validated and safe to share across threads.

#ifndef QADSE_MODEL_HPP
#define QADSE_MODEL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qadse/common.hpp"

namespace qadse {

// The four supported processing-element types. LightPE-1/2 replace the
// multiplier with one or two shifts over power-of-two weight terms.
enum class PeType : int { FP32 = 0, INT16 = 1, LightPE2 = 2, LightPE1 = 3 };

inline constexpr std::array<PeType, 4> kAllPeTypes = {
    PeType::FP32, PeType::INT16, PeType::LightPE2, PeType::LightPE1};

const char* to_string(PeType pe);
PeType pe_type_from_string(std::string_view s);   // throws ValidationError

int activation_bits(PeType pe);   // 32 / 16 / 8 / 8
int weight_bits(PeType pe);       // 32 / 16 / 8 / 4

// Storage widths used by the traffic model, in bytes. LightPE-1 weights are
// half a byte; tensor-level traffic rounds up to whole bytes.
double activation_bytes(PeType pe);   // 4 / 2 / 1 / 1
double weight_bytes(PeType pe);       // 4 / 2 / 1 / 0.5
double psum_bytes(PeType pe);         // 4 for FP32, else 2

// One point in the hardware design space: PE array shape, per-PE scratchpad
// sizes (bytes), global buffer size (bytes), and device bandwidth
// (bytes/cycle).
struct AcceleratorConfig {
    PeType pe_type = PeType::INT16;
    int pe_rows = 1;
    int pe_cols = 1;
    std::int64_t sp_if = 1;
    std::int64_t sp_fw = 1;
    std::int64_t sp_ps = 1;
    std::int64_t glb = 1;
    std::int64_t bw = 1;

    int num_pe() const { return pe_rows * pe_cols; }

    // Throws ValidationError naming the offending field.
    void validate() const;

    bool operator==(const AcceleratorConfig&) const = default;
};

AcceleratorConfig parse_accelerator_config(const std::string& text);
std::string serialize(const AcceleratorConfig& cfg);

// Geometry of one square conv layer. rs/ds flag a regular or dotted
// (projection) skip connection terminating at this layer; at most one of
// the two may be set.
struct LayerShape {
    int a = 1;    // input feature map dimension (square)
    int c = 1;    // input channels
    int f = 1;    // filter count
    int k = 1;    // kernel size
    int s = 1;    // stride
    int p = 0;    // padding
    int rs = 0;   // regular skip connection
    int ds = 0;   // dotted skip connection

    // index >= 0 adds "layer <index>" to diagnostics.
    void validate(int index = -1) const;

    bool operator==(const LayerShape&) const = default;
};

// E = floor((a + 2p - k)/s) + 1. Rejects layers with a + 2p < k.
int output_dim(const LayerShape& layer);

struct NetworkConfig {
    std::string name;
    std::vector<LayerShape> layers;

    void validate() const;

    bool operator==(const NetworkConfig&) const = default;
};

NetworkConfig load_network(const std::string& text);
std::string serialize(const NetworkConfig& net);

} // namespace qadse

#endif
