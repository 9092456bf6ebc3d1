#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lorafp/errors.hpp"
#include "lorafp/represent.hpp"

using namespace lorafp;
using testutil::make_fp;

namespace {

// Fingerprints whose non-sentinel readings are exactly the given values.
std::vector<Fingerprint> fps_with(const std::vector<double>& readings) {
    std::vector<Fingerprint> out;
    for (std::size_t i = 0; i < readings.size(); ++i)
        out.push_back(make_fp({{i % kGatewayCount, readings[i]}}));
    return out;
}

}  // namespace

TEST_CASE("fit scans the training minimum and maximum") {
    auto train = fps_with({-80.0, -120.0, -95.0});
    auto cfg = fit_representation(RepresentationKind::Positive, train);
    CHECK(cfg.train_min == -120.0);
    CHECK(cfg.train_max == -80.0);
}

TEST_CASE("fit ignores the sentinel when scanning") {
    std::vector<Fingerprint> train;
    train.push_back(make_fp({{0, -130.0}, {1, kSentinelRssi}}));
    train.push_back(make_fp({}));  // all sentinel
    auto cfg = fit_representation(RepresentationKind::Positive, train);
    CHECK(cfg.train_min == -130.0);
}

TEST_CASE("fit keeps parameter defaults") {
    auto train = fps_with({-90.0});
    auto cfg = fit_representation(RepresentationKind::Exponential, train);
    CHECK(cfg.alpha == 24.0);
    CHECK(cfg.beta == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK_FALSE(cfg.tau.has_value());
}

TEST_CASE("fit fails when no gateway ever received") {
    std::vector<Fingerprint> train = {make_fp({}), make_fp({})};
    CHECK_THROWS_AS((void)fit_representation(RepresentationKind::Positive, train), FitError);
}

TEST_CASE("fit over index subset uses only the selected records") {
    Dataset d;
    d.records = fps_with({-80.0, -140.0, -95.0});
    std::vector<std::size_t> idx = {0, 2};  // skip the -140 record
    auto cfg = fit_representation(RepresentationKind::Positive, d, idx);
    CHECK(cfg.train_min == -95.0);
    CHECK(cfg.train_max == -80.0);
}

TEST_CASE("positive representation") {
    RepresentationConfig cfg;
    cfg.kind = RepresentationKind::Positive;
    cfg.train_min = -120.0;
    cfg.train_max = -80.0;

    SUBCASE("shifts by train_min - 1") { CHECK(positive_value(cfg, -80.0) == 41.0); }
    SUBCASE("sentinel maps to zero") { CHECK(positive_value(cfg, kSentinelRssi) == 0.0); }
    SUBCASE("the weakest training signal maps to one") { CHECK(positive_value(cfg, -120.0) == 1.0); }
    SUBCASE("values below a set threshold are dropped to zero") {
        cfg.tau = -110.0;
        CHECK(positive_value(cfg, -115.0) == 0.0);
        CHECK(positive_value(cfg, -110.0) == 11.0);
        CHECK(positive_value(cfg, -100.0) == 21.0);
    }
}

TEST_CASE("normalized representation") {
    RepresentationConfig cfg;
    cfg.kind = RepresentationKind::Normalized;
    cfg.train_min = -120.0;
    cfg.train_max = -80.0;

    CHECK(normalized_value(cfg, kSentinelRssi) == 0.0);
    CHECK(normalized_value(cfg, -80.0) == 1.0);
    // Halfway up the positive range: positive = 20.5, divisor = 41.
    CHECK(normalized_value(cfg, -100.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exponential representation") {
    RepresentationConfig cfg;
    cfg.kind = RepresentationKind::Exponential;
    cfg.train_min = -120.0;
    cfg.train_max = -80.0;
    cfg.alpha = 24.0;

    SUBCASE("sentinel lands on the nonzero floor exp(train_min/alpha)") {
        CHECK(exponential_value(cfg, kSentinelRssi) ==
              doctest::Approx(0.006737946999085467).epsilon(1e-12));
    }
    SUBCASE("positive value of -train_min maps to one") {
        // positive(-1) = -1 - (-121) = 120 = -train_min.
        CHECK(exponential_value(cfg, -1.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("stronger signal maps higher") {
        CHECK(exponential_value(cfg, -80.0) > exponential_value(cfg, -90.0));
    }
}

TEST_CASE("powed representation") {
    RepresentationConfig cfg;
    cfg.kind = RepresentationKind::Powed;
    cfg.train_min = -120.0;
    cfg.train_max = -80.0;

    SUBCASE("sentinel maps to zero") {
        cfg.beta = 1.1;
        CHECK(powed_value(cfg, kSentinelRssi) == 0.0);
    }
    SUBCASE("positive value of -train_min maps to one") {
        cfg.beta = 1.1;
        CHECK(powed_value(cfg, -1.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("worked example at beta 1.1") {
        // 41^1.1 / 120^1.1
        cfg.beta = 1.1;
        CHECK(powed_value(cfg, -80.0) == doctest::Approx(0.306875962591003107).epsilon(1e-9));
    }
    SUBCASE("beta 1 only differs from normalized by the divisor") {
        cfg.beta = 1.0;
        double divisor_pow = -cfg.train_min;                          // 120
        double divisor_norm = cfg.train_max - (cfg.train_min - 1.0);  // 41
        for (double rssi : {-80.0, -95.5, -120.0}) {
            double pos = positive_value(cfg, rssi);
            CHECK(powed_value(cfg, rssi) * divisor_pow == doctest::Approx(pos).epsilon(1e-12));
            CHECK(normalized_value(cfg, rssi) * divisor_norm == doctest::Approx(pos).epsilon(1e-12));
        }
    }
}

TEST_CASE("transform maps a silent fingerprint to the flat vector") {
    auto train = fps_with({-120.0, -80.0});
    Fingerprint silent = make_fp({});

    for (auto kind : {RepresentationKind::Positive, RepresentationKind::Normalized,
                      RepresentationKind::Powed}) {
        auto cfg = fit_representation(kind, train);
        auto vec = transform(cfg, silent);
        for (double v : vec) CHECK(v == 0.0);
    }

    auto cfg = fit_representation(RepresentationKind::Exponential, train);
    auto vec = transform(cfg, silent);
    double floor = std::exp(cfg.train_min / cfg.alpha);
    for (double v : vec) CHECK(v == doctest::Approx(floor).epsilon(1e-12));
}

TEST_CASE("transform is elementwise") {
    auto train = fps_with({-120.0, -80.0});
    auto cfg = fit_representation(RepresentationKind::Normalized, train);
    Fingerprint fp = make_fp({{3, -90.0}, {40, -110.0}});
    auto vec = transform(cfg, fp);
    CHECK(vec[3] == normalized_value(cfg, -90.0));
    CHECK(vec[40] == normalized_value(cfg, -110.0));
    CHECK(vec[0] == 0.0);
}

TEST_CASE("representations preserve signal ordering and stay in range") {
    Rng rng(417);
    std::size_t checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        double train_min = -150.0 + 40.0 * uniform_unit(rng);
        double train_max = train_min + 1.0 + 50.0 * uniform_unit(rng);
        double alpha = 5.0 + 85.0 * uniform_unit(rng);
        double beta = 0.7 + 1.0 * uniform_unit(rng);

        RepresentationConfig cfg;
        cfg.train_min = train_min;
        cfg.train_max = train_max;
        cfg.alpha = alpha;
        cfg.beta = beta;

        double a = train_min + (train_max - train_min) * uniform_unit(rng);
        double b = train_min + (train_max - train_min) * uniform_unit(rng);
        if (a < b) std::swap(a, b);  // a is the stronger (less negative) signal

        for (auto kind :
             {RepresentationKind::Positive, RepresentationKind::Normalized,
              RepresentationKind::Exponential, RepresentationKind::Powed}) {
            cfg.kind = kind;
            double va = represent_value(cfg, a);
            double vb = represent_value(cfg, b);
            REQUIRE(std::isfinite(va));
            REQUIRE(va >= represent_value(cfg, kSentinelRssi) - 1e-15);
            REQUIRE(va >= vb);
            if (kind != RepresentationKind::Positive) REQUIRE(va <= 1.0 + 1e-12);
            ++checked;
        }
    }
    CHECK(checked == 1600);
}

TEST_CASE("values below the training minimum stay monotone and finite") {
    RepresentationConfig cfg;
    cfg.train_min = -120.0;
    cfg.train_max = -80.0;
    cfg.beta = 1.3;
    for (auto kind : {RepresentationKind::Positive, RepresentationKind::Normalized,
                      RepresentationKind::Exponential, RepresentationKind::Powed}) {
        cfg.kind = kind;
        double prev = represent_value(cfg, -180.0);
        REQUIRE(std::isfinite(prev));
        for (double rssi = -175.0; rssi <= -121.0; rssi += 1.0) {
            double v = represent_value(cfg, rssi);
            REQUIRE(std::isfinite(v));
            REQUIRE(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("parse_representation round-trips names and rejects junk") {
    for (auto kind : {RepresentationKind::Positive, RepresentationKind::Normalized,
                      RepresentationKind::Exponential, RepresentationKind::Powed})
        CHECK(parse_representation(to_string(kind)) == kind);
    CHECK_THROWS_AS((void)parse_representation("cubic"), ConfigError);
}
