#include "qadse/quant.hpp"

#include <cmath>
#include <limits>

namespace qadse {

void Pow2Weight::validate() const {
    if (sign != 1 && sign != -1)
        throw ValidationError("Pow2Weight sign must be +1 or -1");
    if (k != 1 && k != 2)
        throw ValidationError("Pow2Weight k must be 1 or 2");
    for (int i = 0; i < k; ++i)
        if (m[i] < 0 || m[i] > 7)
            throw ValidationError("Pow2Weight exponent out of range 0..7");
    if (k == 2 && m[0] > m[1])
        throw ValidationError("Pow2Weight exponents must satisfy m1 <= m2");
}

double decode_weight(const Pow2Weight& pw) {
    pw.validate();
    double v = std::ldexp(1.0, -pw.m[0]);
    if (pw.k == 2) v += std::ldexp(1.0, -pw.m[1]);
    return pw.sign * v;
}

Pow2Weight encode_weight_pow2(double w, int k) {
    if (k != 1 && k != 2) throw ValidationError("k must be 1 or 2");
    if (!std::isfinite(w)) throw ValidationError("weight must be finite");

    Pow2Weight best;
    double best_err = std::numeric_limits<double>::infinity();
    double best_mag = std::numeric_limits<double>::infinity();

    auto consider = [&](const Pow2Weight& cand) {
        const double val = decode_weight(cand);
        const double err = std::fabs(w - val);
        const double mag = std::fabs(val);
        // Tie-break: smaller magnitude, then smaller m1.
        const bool better =
            err < best_err ||
            (err == best_err && (mag < best_mag ||
                                 (mag == best_mag && cand.m[0] < best.m[0])));
        if (better) {
            best = cand;
            best_err = err;
            best_mag = mag;
        }
    };

    const int sign = w < 0.0 ? -1 : 1; // sign of 0 treated as +
    for (int s : {sign, -sign}) {      // same-signed codes first, but scan all
        for (int m1 = 0; m1 <= 7; ++m1) {
            if (k == 1) {
                consider(Pow2Weight{s, {m1, 0}, 1});
            } else {
                for (int m2 = m1; m2 <= 7; ++m2)
                    consider(Pow2Weight{s, {m1, m2}, 2});
            }
        }
    }
    return best;
}

std::uint8_t pack_code(const Pow2Weight& pw, PeType pe) {
    pw.validate();
    if (pe == PeType::LightPE1) {
        if (pw.k != 1)
            throw ValidationError("LightPE1 packs one-shift weights (k = 1)");
        return static_cast<std::uint8_t>(((pw.sign < 0 ? 1 : 0) << 3) | pw.m[0]);
    }
    if (pe == PeType::LightPE2) {
        if (pw.k != 2)
            throw ValidationError("LightPE2 packs two-shift weights (k = 2)");
        return static_cast<std::uint8_t>(((pw.sign < 0 ? 1 : 0) << 7) |
                                         (pw.m[0] << 4) | (pw.m[1] << 1));
    }
    throw ValidationError(std::string("pack_code undefined for pe_type ") + to_string(pe));
}

Pow2Weight unpack_code(std::uint8_t code, PeType pe) {
    if (pe == PeType::LightPE1) {
        if (code > 0x0f)
            throw ValidationError("LightPE1 code exceeds 4 bits");
        Pow2Weight pw;
        pw.sign = (code & 0x08) ? -1 : 1;
        pw.m = {code & 0x07, 0};
        pw.k = 1;
        return pw;
    }
    if (pe == PeType::LightPE2) {
        if (code & 0x01)
            throw ValidationError("LightPE2 code has nonzero pad bit");
        Pow2Weight pw;
        pw.sign = (code & 0x80) ? -1 : 1;
        pw.m = {(code >> 4) & 0x07, (code >> 1) & 0x07};
        pw.k = 2;
        if (pw.m[0] > pw.m[1])
            throw ValidationError("LightPE2 code is non-canonical (m1 > m2)");
        return pw;
    }
    throw ValidationError(std::string("unpack_code undefined for pe_type ") + to_string(pe));
}

std::int32_t shift_add_mac(int x, const Pow2Weight& pw, std::int32_t acc) {
    pw.validate();
    if (x < -128 || x > 127)
        throw ValidationError("activation out of signed 8-bit range: " + std::to_string(x));

    std::int64_t term = 0;
    for (int i = 0; i < pw.k; ++i)
        term += static_cast<std::int64_t>(x) * (std::int64_t{1} << (7 - pw.m[i]));
    const std::int64_t result = static_cast<std::int64_t>(acc) + pw.sign * term;
    if (result < std::numeric_limits<std::int32_t>::min() ||
        result > std::numeric_limits<std::int32_t>::max())
        throw ArithmeticError("32-bit accumulator overflow in shift_add_mac");
    return static_cast<std::int32_t>(result);
}

double reference_mac(double x, double w, double acc, PeType pe) {
    switch (pe) {
        case PeType::FP32: {
            const float r = static_cast<float>(x) * static_cast<float>(w) +
                            static_cast<float>(acc);
            return static_cast<double>(r);
        }
        case PeType::INT16: {
            auto check16 = [](double v, const char* what) {
                if (v != std::floor(v))
                    throw ValidationError(std::string("INT16 ") + what +
                                          " must be integral");
                if (v < -32768.0 || v > 32767.0)
                    throw ArithmeticError(std::string("INT16 ") + what +
                                          " out of 16-bit range");
                return static_cast<std::int64_t>(v);
            };
            const std::int64_t xi = check16(x, "operand");
            const std::int64_t wi = check16(w, "operand");
            const std::int64_t ai = check16(acc, "accumulator");
            const std::int64_t r = xi * wi + ai;
            if (r < -32768 || r > 32767)
                throw ArithmeticError("INT16 overflow in reference_mac");
            return static_cast<double>(r);
        }
        case PeType::LightPE2:
            return acc + x * decode_weight(encode_weight_pow2(w, 2));
        case PeType::LightPE1:
            return acc + x * decode_weight(encode_weight_pow2(w, 1));
    }
    throw ValidationError("unknown pe_type in reference_mac");
}

QuantizedTensor quantize_tensor(std::span<const double> weights, PeType pe) {
    if (weights.empty()) throw ValidationError("cannot quantize an empty tensor");

    QuantizedTensor out;
    out.pe_type = pe;
    out.values.reserve(weights.size());

    double sum_err = 0.0;
    auto record = [&](double w, double v) {
        out.values.push_back(v);
        const double err = std::fabs(w - v);
        sum_err += err;
        out.stats.max_abs_err = std::max(out.stats.max_abs_err, err);
    };

    switch (pe) {
        case PeType::FP32:
            for (double w : weights) record(w, w);
            break;
        case PeType::INT16: {
            double max_abs = 0.0;
            for (double w : weights) max_abs = std::max(max_abs, std::fabs(w));
            const double scale = max_abs > 0.0 ? max_abs / 32767.0 : 1.0;
            for (double w : weights) {
                const double q = std::round(w / scale); // half away from zero
                record(w, q * scale);
            }
            break;
        }
        case PeType::LightPE2:
        case PeType::LightPE1: {
            const int k = pe == PeType::LightPE2 ? 2 : 1;
            out.codes.reserve(weights.size());
            for (double w : weights) {
                const Pow2Weight pw = encode_weight_pow2(w, k);
                out.codes.push_back(pw);
                record(w, decode_weight(pw));
            }
            break;
        }
    }
    out.stats.count = weights.size();
    out.stats.mean_abs_err = sum_err / static_cast<double>(weights.size());
    return out;
}

} // namespace qadse
