#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "hybridbsc/embed.hpp"
#include "hybridbsc/metrics.hpp"
#include "hybridbsc/rng.hpp"
#include "hybridbsc/synth.hpp"

using namespace hbsc;

namespace {

std::vector<uint8_t> random_bits(size_t n, uint64_t seed) {
    std::vector<uint8_t> bits(n);
    Rng rng(seed);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
    return bits;
}

}  // namespace

TEST_CASE("qim embeds onto odd/even lattice points") {
    // eta = ceil(30/14) = 3 (odd)
    CHECK(qim_embed(30.0, 0, 14.0) == Catch::Approx(42.0).margin(1e-12));
    CHECK(qim_embed(30.0, 1, 14.0) == Catch::Approx(56.0).margin(1e-12));
    // eta = ceil(28/14) = 2 (even): bit 1 keeps it, bit 0 moves up
    CHECK(qim_embed(28.0, 1, 14.0) == Catch::Approx(28.0).margin(1e-12));
    CHECK(qim_embed(28.0, 0, 14.0) == Catch::Approx(42.0).margin(1e-12));
    // sigma = 0: eta = 0 is even
    CHECK(qim_embed(0.0, 1, 14.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(qim_embed(0.0, 0, 14.0) == Catch::Approx(14.0).margin(1e-12));
}

TEST_CASE("qim midpoint mode shifts half a step down and still extracts") {
    CHECK(qim_embed(30.0, 0, 14.0, true) == Catch::Approx(35.0).margin(1e-12));
    CHECK(qim_embed(28.0, 1, 14.0, true) == Catch::Approx(21.0).margin(1e-12));
    CHECK(qim_embed(0.0, 1, 14.0, true) == Catch::Approx(0.0).margin(1e-12));  // clamped at zero
    CHECK(qim_extract(35.0, 14.0) == 0);
    CHECK(qim_extract(21.0, 14.0) == 1);
}

TEST_CASE("qim extraction inverts embedding on a dense sigma sweep") {
    for (double alpha : {6.0, 14.0, 20.0}) {
        for (int i = 0; i <= 4000; ++i) {
            const double sigma = alpha * 40.0 * i / 4000.0;
            for (int bit : {0, 1}) {
                REQUIRE(qim_extract(qim_embed(sigma, bit, alpha), alpha) == bit);
                REQUIRE(qim_extract(qim_embed(sigma, bit, alpha, true), alpha) == bit);
            }
        }
    }
}

TEST_CASE("qim validates arguments") {
    REQUIRE_THROWS(qim_embed(1.0, 0, 0.0));
    REQUIRE_THROWS(qim_embed(-1.0, 0, 14.0));
    REQUIRE_THROWS(qim_extract(1.0, -2.0));
}

TEST_CASE("feature quantizer produces MSB-first codes and preserves the rails") {
    FeatureTensor f(1, 3, 1);
    f.v = {0.5, 0.0, 1.0};
    const QuantizedPayload p = quantize_features(f, 4);
    REQUIRE(p.bits.size() == 12);
    // 0.5 -> round(0.5*15) = 8 -> 1000; 0.0 -> 0000; 1.0 -> 15 -> 1111
    const std::vector<uint8_t> expect{1, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
    CHECK(p.bits == expect);
    const FeatureTensor back = dequantize_features(p, 4);
    CHECK(back.v[0] == Catch::Approx(8.0 / 15.0).margin(1e-12));
    CHECK(back.v[1] == 0.0);
    CHECK(back.v[2] == 1.0);
}

TEST_CASE("quantizer round trip error stays within half a grid step") {
    Rng rng(11);
    for (int q : {1, 4, 8}) {
        const double step = 1.0 / ((1 << q) - 1);
        FeatureTensor f(2, 50, 1);
        for (auto& v : f.v) v = rng.uniform();
        const FeatureTensor back = dequantize_features(quantize_features(f, q), q);
        for (size_t i = 0; i < f.size(); ++i)
            REQUIRE(std::abs(back.v[i] - f.v[i]) <= 0.5 * step + 1e-12);
    }
}

TEST_CASE("quantizer round trip is idempotent on cell midpoints") {
    Rng rng(5);
    FeatureTensor f(4, 7, 1);
    for (auto& v : f.v) v = rng.uniform();
    for (int q : {1, 4, 8}) {
        const QuantizedPayload p = quantize_features(f, q);
        REQUIRE(p.bits.size() == f.size() * static_cast<size_t>(q));
        const FeatureTensor mid = dequantize_features(p, q);
        const QuantizedPayload p2 = quantize_features(mid, q);
        CHECK(p2.bits == p.bits);
    }
    REQUIRE_THROWS(quantize_features(f, 0));
    REQUIRE_THROWS(quantize_features(f, 17));
}

TEST_CASE("capacity counts one bit per 4x4 LL block") {
    CHECK(capacity_bits(512, 512) == 4096);
    CHECK(capacity_bits(448, 448) == 3136);
    CHECK(capacity_bits(64, 32) == 32);
    REQUIRE_THROWS(capacity_bits(100, 64));  // not a multiple of 8
}

TEST_CASE("plane-level embed/extract round trips at full capacity") {
    Rng rng(6);
    Plane y(64, 48);
    for (auto& v : y.data) v = rng.uniform(16.0, 235.0);
    const long cap = capacity_bits(64, 48);
    const auto bits = random_bits(static_cast<size_t>(cap), 7);
    for (bool midpoint : {false, true}) {
        EmbedConfig cfg;
        cfg.midpoint = midpoint;
        Plane host = y;
        InsertStats st;
        embed_bits_in_y(host, bits, cfg, &st);
        CHECK(st.blocks_embedded == cap);
        CHECK(extract_bits_from_y(host, bits.size(), cfg) == bits);
    }
}

TEST_CASE("payload survives 8-bit materialization of the hybrid image") {
    const RgbImage carrier = make_carrier(128, 128, 42);
    const long cap = capacity_bits(128, 128);
    QuantizedPayload payload;
    payload.bits = random_bits(static_cast<size_t>(cap), 9);
    payload.feat_height = 1;
    payload.feat_width = static_cast<int>(cap);
    EmbedConfig cfg;  // midpoint embedding is the transport default
    cfg.midpoint = true;
    InsertStats st;
    const RgbImage hybrid = insert_payload(carrier, payload, cfg, &st);
    REQUIRE(st.blocks_embedded == cap);
    const auto got = extract_payload_bits(hybrid, payload.bits.size(), cfg);
    CHECK(got == payload.bits);
}

TEST_CASE("embedding distortion stays moderate at alpha 14") {
    const RgbImage carrier = make_carrier(128, 128, 43);
    QuantizedPayload payload;
    payload.bits = random_bits(static_cast<size_t>(capacity_bits(128, 128)), 10);
    EmbedConfig cfg;
    cfg.midpoint = true;
    const RgbImage hybrid = insert_payload(carrier, payload, cfg);
    const double p = psnr(carrier, hybrid);
    CHECK(p > 32.0);  // insertion is mild
    CHECK(p < 60.0);  // but it did change the image
}

TEST_CASE("payload exceeding capacity is rejected") {
    const RgbImage carrier = make_carrier(64, 64, 44);
    QuantizedPayload payload;
    payload.bits = random_bits(static_cast<size_t>(capacity_bits(64, 64)) + 1, 11);
    REQUIRE_THROWS(insert_payload(carrier, payload, EmbedConfig{}));
}

TEST_CASE("bit packing and payload framing round trip") {
    const auto bits = random_bits(37, 12);
    const auto bytes = pack_bits(bits);
    REQUIRE(bytes.size() == 5);
    CHECK(unpack_bits(bytes, bits.size()) == bits);

    const auto framed = frame_payload(bits);
    REQUIRE(framed.size() == 4 + 5);
    CHECK(unframe_payload(framed) == bits);

    auto truncated = framed;
    truncated.resize(6);
    REQUIRE_THROWS(unframe_payload(truncated));
}
