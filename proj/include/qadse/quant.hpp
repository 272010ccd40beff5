// quant.hpp
//
// Power-of-two weight encoding and shift-add multiply-accumulate arithmetic
// for the LightPE datapaths, plus exact INT16/FP32 reference MACs.
//
// A LightPE weight is sign * sum_i 2^-m_i with one exponent (LightPE-1) or
// two (LightPE-2), each m in 0..7. Products are kept at fixed-point scale
// 2^-7, so x * w becomes sign * sum_i (x << (7 - m_i)) with no rounding.

#ifndef QADSE_QUANT_HPP
#define QADSE_QUANT_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qadse/common.hpp"
#include "qadse/model.hpp"

namespace qadse {

struct Pow2Weight {
    int sign = 1;                  // +1 or -1
    std::array<int, 2> m = {0, 0}; // exponents; m[1] used only when k == 2, m[0] <= m[1]
    int k = 1;                     // number of shifts (1 or 2)

    void validate() const;
    bool operator==(const Pow2Weight&) const = default;
};

// Nearest representable encoding of w with k shifts. Ties break toward the
// smaller decoded magnitude, then the smaller m1. Any finite real maps to a
// code (the code space saturates); sign of 0 is treated as +.
Pow2Weight encode_weight_pow2(double w, int k);

// Exact dyadic value sign * sum_i 2^-m_i.
double decode_weight(const Pow2Weight& pw);

// Bit layouts (MSB first):
//   LightPE-1, 4 bits: [sign | m(3)]
//   LightPE-2, 8 bits: [sign | m1(3) | m2(3) | pad(1) = 0]
// Sign bit 0 means positive. unpack_code rejects non-canonical LightPE-2
// codes (nonzero pad bit or m1 > m2).
std::uint8_t pack_code(const Pow2Weight& pw, PeType pe);
Pow2Weight unpack_code(std::uint8_t code, PeType pe);

// acc' = acc + sign * sum_i (x << (7 - m_i)); the added term equals
// 2^7 * x * decode(pw) exactly. x must be a signed 8-bit activation.
// Throws ArithmeticError if the result leaves the 32-bit accumulator range.
std::int32_t shift_add_mac(int x, const Pow2Weight& pw, std::int32_t acc);

// Exact multiply-accumulate in the precision of the PE type:
//   FP32      float(x) * float(w) + float(acc), returned widened to double
//   INT16     integer multiply-add; throws ArithmeticError if x, w, acc or
//             the result leave the 16-bit signed range
//   LightPE-k acc + x * decode(encode_weight_pow2(w, k))
double reference_mac(double x, double w, double acc, PeType pe);

struct QuantStats {
    double mean_abs_err = 0.0;
    double max_abs_err = 0.0;
    std::size_t count = 0;
};

struct QuantizedTensor {
    PeType pe_type = PeType::FP32;
    std::vector<Pow2Weight> codes; // populated for LightPE types only
    std::vector<double> values;    // effective (dequantized) weight values
    QuantStats stats;
};

// Element-wise nearest encoding for LightPE types; INT16 uses per-tensor
// symmetric scaling with round-half-away-from-zero; FP32 passes through.
QuantizedTensor quantize_tensor(std::span<const double> weights, PeType pe);

} // namespace qadse

#endif
