#include <algorithm>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lorafp/errors.hpp"
#include "lorafp/knn.hpp"
#include "lorafp/reference.hpp"
#include "lorafp/rng.hpp"

using namespace lorafp;

namespace {

const MetricKind kAllMetrics[] = {
    MetricKind::Euclidean, MetricKind::Manhattan, MetricKind::Chebyshev, MetricKind::Hamming,
    MetricKind::Canberra,  MetricKind::BrayCurtis, MetricKind::Jaccard,  MetricKind::Matching,
    MetricKind::Dice,      MetricKind::Kulsinski,
};

struct Instance {
    Matrix x;
    std::vector<LatLon> y;
};

Instance random_instance(std::size_t n, std::size_t dim, std::uint64_t seed, double zero_rate = 0.4) {
    Rng rng(seed);
    Instance inst;
    inst.x = Matrix(n, dim);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            inst.x(r, c) = uniform_unit(rng) < zero_rate ? 0.0 : uniform_unit(rng);
    for (std::size_t r = 0; r < n; ++r)
        inst.y.push_back({51.0 + uniform_unit(rng), 4.0 + uniform_unit(rng)});
    return inst;
}

}  // namespace

TEST_CASE("fit validates k against the training size") {
    auto inst = random_instance(5, 4, 1);
    CHECK_NOTHROW((void)KnnModel::fit(inst.x, inst.y, MetricKind::Euclidean, 5));
    CHECK_THROWS_AS((void)KnnModel::fit(inst.x, inst.y, MetricKind::Euclidean, 6), ConfigError);
    CHECK_THROWS_AS((void)KnnModel::fit(inst.x, inst.y, MetricKind::Euclidean, 0), ConfigError);
    auto bad = inst.y;
    bad.pop_back();
    CHECK_THROWS_AS((void)KnnModel::fit(inst.x, bad, MetricKind::Euclidean, 2), ConfigError);
}

TEST_CASE("k=1 on a training row returns that row's coordinates") {
    auto inst = random_instance(30, 8, 2, 0.0);  // no zeros, so rows are unique
    auto model = KnnModel::fit(inst.x, inst.y, MetricKind::Euclidean, 1);
    for (std::size_t r = 0; r < 30; ++r) {
        LatLon p = model.predict(inst.x.row(r));
        CHECK(p.lat == inst.y[r].lat);
        CHECK(p.lon == inst.y[r].lon);
    }
}

TEST_CASE("k=2 averages the two nearest positions") {
    Matrix x(3, 2);
    x(0, 0) = 0.0; x(0, 1) = 0.0;
    x(1, 0) = 1.0; x(1, 1) = 0.0;
    x(2, 0) = 9.0; x(2, 1) = 9.0;
    std::vector<LatLon> y = {{51.20, 4.40}, {51.22, 4.42}, {40.0, -3.0}};
    auto model = KnnModel::fit(x, y, MetricKind::Euclidean, 2);
    std::vector<double> q = {0.4, 0.0};
    LatLon p = model.predict(q);
    CHECK(p.lat == doctest::Approx(51.21).epsilon(1e-12));
    CHECK(p.lon == doctest::Approx(4.41).epsilon(1e-12));
}

TEST_CASE("heap selection agrees with the sort-everything reference") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto inst = random_instance(50, 10, 100 + seed);
        Rng qrng(900 + seed);
        for (auto metric : kAllMetrics) {
            auto model = KnnModel::fit(inst.x, inst.y, metric, 1);
            std::vector<double> q(10);
            for (double& v : q) v = uniform_unit(qrng) < 0.3 ? 0.0 : uniform_unit(qrng);
            for (std::size_t k = 1; k <= 10; ++k) {
                auto ours = model.predict_topk(q, k);
                auto ref = ref_knn_topk(inst.x, metric, q, k);
                REQUIRE(ours == ref);
                // And the prediction is the mean over exactly that list.
                LatLon agg = KnnModel::aggregate(ref, k, model.coords());
                auto direct = KnnModel::fit(inst.x, inst.y, metric, k).predict(q);
                REQUIRE(direct.lat == agg.lat);
                REQUIRE(direct.lon == agg.lon);
            }
        }
    }
}

TEST_CASE("topk with k_max = N is a full sorted ordering") {
    auto inst = random_instance(40, 6, 7);
    auto model = KnnModel::fit(inst.x, inst.y, MetricKind::Manhattan, 1);
    std::vector<double> q(6, 0.5);
    auto all = model.predict_topk(q, 40);
    REQUIRE(all.size() == 40);

    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < all.size(); ++i) {
        indices.push_back(all[i].index);
        if (i > 0) {
            bool ordered = all[i - 1].distance < all[i].distance ||
                           (all[i - 1].distance == all[i].distance && all[i - 1].index < all[i].index);
            REQUIRE(ordered);
        }
    }
    std::sort(indices.begin(), indices.end());
    for (std::size_t i = 0; i < indices.size(); ++i) REQUIRE(indices[i] == i);
}

TEST_CASE("topk lists are prefix-stable in k_max") {
    auto inst = random_instance(60, 8, 8);
    auto model = KnnModel::fit(inst.x, inst.y, MetricKind::BrayCurtis, 1);
    Rng qrng(44);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> q(8);
        for (double& v : q) v = uniform_unit(qrng);
        auto wide = model.predict_topk(q, 20);
        for (std::size_t k = 1; k <= 20; ++k) {
            auto narrow = model.predict_topk(q, k);
            REQUIRE(narrow.size() == k);
            REQUIRE(std::equal(narrow.begin(), narrow.end(), wide.begin()));
        }
    }
}

TEST_CASE("predict equals the mean over the first k of the top-k list") {
    auto inst = random_instance(80, 12, 9);
    Rng qrng(55);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> q(12);
        for (double& v : q) v = uniform_unit(qrng);
        std::size_t k = 1 + uniform_below(qrng, 15);
        auto model = KnnModel::fit(inst.x, inst.y, MetricKind::Euclidean, k);
        auto top = model.predict_topk(q, 15);
        LatLon mean = KnnModel::aggregate(top, k, model.coords());
        LatLon direct = model.predict(q);
        REQUIRE(direct.lat == mean.lat);
        REQUIRE(direct.lon == mean.lon);
    }
}

TEST_CASE("distance ties break toward the lower training index") {
    Matrix x(3, 2);
    x(0, 0) = 1.0; x(0, 1) = 1.0;
    x(1, 0) = 1.0; x(1, 1) = 1.0;  // duplicate of row 0
    x(2, 0) = 5.0; x(2, 1) = 5.0;
    std::vector<LatLon> y = {{51.0, 4.0}, {52.0, 5.0}, {53.0, 6.0}};
    auto model = KnnModel::fit(x, y, MetricKind::Euclidean, 1);
    std::vector<double> q = {1.0, 1.0};
    LatLon p = model.predict(q);
    CHECK(p.lat == 51.0);
    CHECK(p.lon == 4.0);

    auto top = model.predict_topk(q, 3);
    CHECK(top[0].index == 0);
    CHECK(top[1].index == 1);
    CHECK(top[0].distance == top[1].distance);
}

TEST_CASE("duplicating a training row never changes a k=1 prediction") {
    auto inst = random_instance(25, 5, 10);
    auto model = KnnModel::fit(inst.x, inst.y, MetricKind::Manhattan, 1);

    Matrix x2(26, 5);
    std::vector<LatLon> y2;
    for (std::size_t r = 0; r < 25; ++r) {
        for (std::size_t c = 0; c < 5; ++c) x2(r, c) = inst.x(r, c);
        y2.push_back(inst.y[r]);
    }
    for (std::size_t c = 0; c < 5; ++c) x2(25, c) = inst.x(7, c);  // duplicate row 7 at the end
    y2.push_back({0.0, 0.0});  // decoy target; the tie rule must prefer index 7

    auto dup = KnnModel::fit(x2, y2, MetricKind::Manhattan, 1);
    Rng qrng(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> q(5);
        for (double& v : q) v = uniform_unit(qrng);
        LatLon a = model.predict(q);
        LatLon b = dup.predict(q);
        REQUIRE(a.lat == b.lat);
        REQUIRE(a.lon == b.lon);
    }
}

TEST_CASE("permuting training rows leaves predictions unchanged when no ties exist") {
    auto inst = random_instance(40, 7, 11, 0.0);
    Rng prng(123);
    auto perm = random_permutation(40, prng);

    Matrix px(40, 7);
    std::vector<LatLon> py(40);
    for (std::size_t r = 0; r < 40; ++r) {
        for (std::size_t c = 0; c < 7; ++c) px(r, c) = inst.x(perm[r], c);
        py[r] = inst.y[perm[r]];
    }

    auto a = KnnModel::fit(inst.x, inst.y, MetricKind::Euclidean, 5);
    auto b = KnnModel::fit(px, py, MetricKind::Euclidean, 5);
    Rng qrng(321);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> q(7);
        for (double& v : q) v = uniform_unit(qrng);
        LatLon pa = a.predict(q);
        LatLon pb = b.predict(q);
        REQUIRE(pa.lat == pb.lat);
        REQUIRE(pa.lon == pb.lon);
    }
}

TEST_CASE("binarizing features does not move boolean-metric predictions") {
    auto inst = random_instance(50, 9, 12, 0.5);
    Matrix bx(50, 9);
    for (std::size_t r = 0; r < 50; ++r)
        for (std::size_t c = 0; c < 9; ++c) bx(r, c) = inst.x(r, c) != 0.0 ? 1.0 : 0.0;

    Rng qrng(13);
    for (auto metric : kBooleanMetrics) {
        auto a = KnnModel::fit(inst.x, inst.y, metric, 3);
        auto b = KnnModel::fit(bx, inst.y, metric, 3);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> q(9);
            for (double& v : q) v = uniform_unit(qrng) < 0.5 ? 0.0 : uniform_unit(qrng);
            std::vector<double> bq(9);
            for (std::size_t c = 0; c < 9; ++c) bq[c] = q[c] != 0.0 ? 1.0 : 0.0;
            LatLon pa = a.predict(q);
            LatLon pb = b.predict(bq);
            REQUIRE(pa.lat == pb.lat);
            REQUIRE(pa.lon == pb.lon);
        }
    }
}

TEST_CASE("batch prediction matches the single-query path element for element") {
    auto inst = random_instance(70, 10, 14);
    auto model = KnnModel::fit(inst.x, inst.y, MetricKind::Canberra, 4);
    auto queries = testutil::random_matrix(33, 10, 15, 0.0, 1.0);

    auto batch = model.predict_batch(queries);
    auto topk_batch = model.predict_topk_batch(queries, 6);
    REQUIRE(batch.size() == 33);
    for (std::size_t i = 0; i < 33; ++i) {
        LatLon single = model.predict(queries.row(i));
        REQUIRE(batch[i].lat == single.lat);
        REQUIRE(batch[i].lon == single.lon);
        REQUIRE(topk_batch[i] == model.predict_topk(queries.row(i), 6));
    }
}
