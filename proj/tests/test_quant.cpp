#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qadse/quant.hpp"
#include "qadse/rng.hpp"

using namespace qadse;

namespace {

// Independent enumeration of the full code space, for brute-force checks.
std::vector<Pow2Weight> all_codes(int k) {
    std::vector<Pow2Weight> codes;
    for (int sign : {1, -1}) {
        for (int m1 = 0; m1 <= 7; ++m1) {
            if (k == 1) {
                codes.push_back({sign, {m1, 0}, 1});
            } else {
                for (int m2 = m1; m2 <= 7; ++m2) codes.push_back({sign, {m1, m2}, 2});
            }
        }
    }
    return codes;
}

// Brute-force nearest code with the spec tie rules, written independently of
// the implementation's scan order.
Pow2Weight brute_force_encode(double w, int k) {
    std::vector<Pow2Weight> codes = all_codes(k);
    return *std::min_element(
        codes.begin(), codes.end(), [&](const Pow2Weight& a, const Pow2Weight& b) {
            const double va = decode_weight(a), vb = decode_weight(b);
            const double ea = std::fabs(w - va), eb = std::fabs(w - vb);
            if (ea != eb) return ea < eb;
            if (std::fabs(va) != std::fabs(vb)) return std::fabs(va) < std::fabs(vb);
            if (a.m[0] != b.m[0]) return a.m[0] < b.m[0];
            return a.sign > b.sign; // prefer + on the exact-zero tie
        });
}

} // namespace

TEST_CASE("decode_weight exact dyadic values") {
    CHECK(decode_weight({1, {0, 0}, 1}) == 1.0);
    CHECK(decode_weight({1, {0, 0}, 2}) == 2.0);
    CHECK(decode_weight({-1, {1, 3}, 2}) == -0.625);
    CHECK(decode_weight({1, {7, 0}, 1}) == 0.0078125);
}

TEST_CASE("encode_weight_pow2 nearest-code examples") {
    const Pow2Weight half = encode_weight_pow2(0.5, 1);
    CHECK(half.sign == 1);
    CHECK(half.m[0] == 1);

    const Pow2Weight neg = encode_weight_pow2(-0.7, 1);
    CHECK(neg.sign == -1);
    CHECK(neg.m[0] == 1); // -0.5: error 0.2 beats -1.0's 0.3

    const Pow2Weight two = encode_weight_pow2(0.7, 2);
    CHECK(two.sign == 1);
    CHECK(two.m[0] == 1);
    CHECK(two.m[1] == 2); // 0.75, error 0.05
    CHECK(decode_weight(two) == 0.75);
}

TEST_CASE("encode agrees with a brute-force argmin over the code table") {
    Rng rng(2024);
    for (int k : {1, 2}) {
        for (int i = 0; i < 10000; ++i) {
            const double w = rng.uniform(-2.5, 2.5);
            CHECK(encode_weight_pow2(w, k) == brute_force_encode(w, k));
        }
    }
}

TEST_CASE("LightPE-2 error never exceeds LightPE-1 error away from zero") {
    // Every one-shift value with m <= 6 equals 2^-(m+1) + 2^-(m+1), so a
    // two-shift code can always match it. The one exception is +-2^-7, whose
    // two-term form would need m = 8: below |w| = 3*2^-8 the one-shift code
    // 2^-7 is strictly closer than LightPE-2's smallest magnitude 2^-6.
    Rng rng(7);
    const double lo = 3.0 / 256.0;
    int checked = 0;
    for (int i = 0; i < 4000; ++i) {
        const double w = rng.uniform(-1.0, 1.0);
        if (std::fabs(w) < lo) continue;
        ++checked;
        const double e1 = std::fabs(w - decode_weight(encode_weight_pow2(w, 1)));
        const double e2 = std::fabs(w - decode_weight(encode_weight_pow2(w, 2)));
        CHECK(e2 <= e1);
    }
    CHECK(checked > 3000);

    SUBCASE("the near-zero exception is real") {
        const double w = 0.004; // closer to 2^-7 than to 2^-6
        const double e1 = std::fabs(w - decode_weight(encode_weight_pow2(w, 1)));
        const double e2 = std::fabs(w - decode_weight(encode_weight_pow2(w, 2)));
        CHECK(e1 < e2);
    }
}

TEST_CASE("pack/unpack bit layouts") {
    CHECK(pack_code({1, {7, 0}, 1}, PeType::LightPE1) == 0b0111);
    CHECK(pack_code({-1, {0, 0}, 1}, PeType::LightPE1) == 0b1000);
    CHECK(pack_code({1, {1, 2}, 2}, PeType::LightPE2) == 0b00010100);
    CHECK(pack_code({-1, {7, 7}, 2}, PeType::LightPE2) == 0b11111110);

    SUBCASE("all 16 LightPE-1 codes round-trip bijectively") {
        std::vector<bool> seen(16, false);
        for (const Pow2Weight& pw : all_codes(1)) {
            const std::uint8_t code = pack_code(pw, PeType::LightPE1);
            CHECK(code < 16);
            CHECK(!seen[code]);
            seen[code] = true;
            CHECK(unpack_code(code, PeType::LightPE1) == pw);
        }
    }
    SUBCASE("all 72 canonical LightPE-2 codes round-trip bijectively") {
        std::vector<std::uint8_t> codes;
        for (const Pow2Weight& pw : all_codes(2)) {
            const std::uint8_t code = pack_code(pw, PeType::LightPE2);
            CHECK((code & 1) == 0); // pad bit
            codes.push_back(code);
            CHECK(unpack_code(code, PeType::LightPE2) == pw);
        }
        std::sort(codes.begin(), codes.end());
        CHECK(std::adjacent_find(codes.begin(), codes.end()) == codes.end());
        CHECK(codes.size() == 72);
    }
    SUBCASE("non-canonical codes are rejected") {
        CHECK_THROWS_AS(unpack_code(0b00000001, PeType::LightPE2), ValidationError);
        CHECK_THROWS_AS(unpack_code(0b00100000, PeType::LightPE2), ValidationError); // m1=2 > m2=0
        CHECK_THROWS_AS(unpack_code(0x1f, PeType::LightPE1), ValidationError);
        CHECK_THROWS_AS(pack_code({1, {1, 2}, 2}, PeType::LightPE1), ValidationError);
        CHECK_THROWS_AS(pack_code({1, {1, 0}, 1}, PeType::FP32), ValidationError);
    }
}

TEST_CASE("shift_add_mac fixed-point examples") {
    CHECK(shift_add_mac(4, {1, {2, 0}, 1}, 0) == 128);    // 4 * 0.25 at scale 2^-7
    CHECK(shift_add_mac(3, {1, {1, 3}, 2}, 0) == 240);    // 3<<6 + 3<<4
    CHECK(shift_add_mac(-128, {-1, {0, 0}, 1}, 0) == 16384);
    CHECK(shift_add_mac(5, {1, {0, 0}, 1}, 100) == 740);  // accumulates

    CHECK_THROWS_AS(shift_add_mac(200, {1, {0, 0}, 1}, 0), ValidationError);
    CHECK_THROWS_AS(
        shift_add_mac(127, {1, {0, 0}, 2}, std::numeric_limits<std::int32_t>::max()),
        ArithmeticError);
}

TEST_CASE("shift-add term equals 2^7 * x * decode(w) exhaustively") {
    std::vector<Pow2Weight> codes = all_codes(1);
    const std::vector<Pow2Weight> two = all_codes(2);
    codes.insert(codes.end(), two.begin(), two.end());
    REQUIRE(codes.size() == 16 + 72);
    for (int x = -128; x <= 127; ++x) {
        for (const Pow2Weight& pw : codes) {
            const double expected = 128.0 * x * decode_weight(pw); // exact dyadic
            CHECK(shift_add_mac(x, pw, 0) == static_cast<std::int32_t>(expected));
        }
    }
}

TEST_CASE("reference_mac per PE type") {
    CHECK(reference_mac(3, -2, 10, PeType::INT16) == 4.0);
    CHECK(reference_mac(0.5, 0.5, 0.0, PeType::FP32) == 0.25);
    CHECK_THROWS_AS(reference_mac(32767, 2, 0, PeType::INT16), ArithmeticError);
    CHECK_THROWS_AS(reference_mac(1.5, 2, 0, PeType::INT16), ValidationError);
    // LightPE reference uses the quantized weight value.
    CHECK(reference_mac(2.0, 0.7, 0.0, PeType::LightPE2) == doctest::Approx(1.5));
    CHECK(reference_mac(2.0, 0.7, 0.0, PeType::LightPE1) == doctest::Approx(1.0));
}

TEST_CASE("quantize_tensor") {
    SUBCASE("exactly representable weights have zero error") {
        const QuantizedTensor q = quantize_tensor(std::vector<double>{0.5, -1.0},
                                                  PeType::LightPE1);
        CHECK(q.stats.mean_abs_err == 0.0);
        CHECK(q.stats.max_abs_err == 0.0);
        CHECK(q.stats.count == 2);
        CHECK(q.codes.size() == 2);
    }
    SUBCASE("derived single-weight errors") {
        const QuantizedTensor q2 = quantize_tensor(std::vector<double>{0.7},
                                                   PeType::LightPE2);
        CHECK(q2.stats.mean_abs_err == doctest::Approx(0.05));
        const QuantizedTensor q1 = quantize_tensor(std::vector<double>{0.7},
                                                   PeType::LightPE1);
        CHECK(q1.stats.mean_abs_err == doctest::Approx(0.2));
    }
    SUBCASE("INT16 symmetric scaling") {
        const QuantizedTensor q = quantize_tensor(std::vector<double>{1.0, -0.5, 0.25},
                                                  PeType::INT16);
        CHECK(q.stats.max_abs_err <= 1.0 / 32767.0);
        CHECK(q.codes.empty());
    }
    SUBCASE("FP32 passes through") {
        const QuantizedTensor q = quantize_tensor(std::vector<double>{0.123, -9.0},
                                                  PeType::FP32);
        CHECK(q.stats.max_abs_err == 0.0);
    }
    SUBCASE("empty tensor is rejected") {
        CHECK_THROWS_AS(quantize_tensor(std::vector<double>{}, PeType::LightPE1),
                        ValidationError);
    }
    SUBCASE("near-zero weights saturate to the smallest magnitude") {
        const QuantizedTensor q = quantize_tensor(std::vector<double>{0.0},
                                                  PeType::LightPE1);
        CHECK(q.values[0] == 0.0078125); // +2^-7
    }
}
