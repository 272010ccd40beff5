#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qadse/rng.hpp"
#include "qadse/surrogate.hpp"

using namespace qadse;

namespace {

// Random polynomial of exact total degree <= K with positive offset, so the
// truth never crosses zero on [0,1]^d and relative errors stay meaningful.
struct RandomPoly {
    MonomialBasis basis;
    std::vector<double> coef;

    double eval(const std::vector<double>& x) const {
        double sum = 0.0;
        for (std::size_t j = 0; j < basis.size(); ++j) {
            double term = coef[j];
            for (int i = 0; i < basis.d; ++i)
                for (int e = 0; e < basis.exponents[j][i]; ++e) term *= x[i];
            sum += term;
        }
        return sum;
    }
};

RandomPoly random_poly(int d, int K, Rng& rng) {
    RandomPoly poly;
    poly.basis = build_basis(d, K);
    poly.coef.resize(poly.basis.size());
    double mass = 0.0;
    for (double& c : poly.coef) {
        c = rng.uniform(-1.0, 1.0);
        mass += std::fabs(c);
    }
    for (double& c : poly.coef) c *= 2.0 / mass; // sum |c_j| = 2
    poly.coef[0] += 5.0;                          // truth stays in [3, 7]
    return poly;
}

std::vector<std::vector<double>> random_rows(int d, std::size_t n, Rng& rng) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& row : rows)
        for (double& v : row) v = rng.uniform();
    return rows;
}

} // namespace

TEST_CASE("basis sizes match C(d+K, K)") {
    CHECK(build_basis(1, 0).size() == 1);
    CHECK(build_basis(4, 5).size() == 126);
    CHECK(build_basis(14, 5).size() == 11628);
    CHECK(binomial(9, 5) == 126);
    CHECK(binomial(19, 5) == 11628);
    for (int d = 1; d <= 6; ++d)
        for (int K = 0; K <= 6; ++K)
            CHECK(build_basis(d, K).size() ==
                  binomial(static_cast<unsigned>(d + K), static_cast<unsigned>(K)));
}

TEST_CASE("basis is graded-lex ordered with the constant term first") {
    const MonomialBasis b = build_basis(2, 2);
    const std::vector<std::vector<int>> expected = {
        {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    CHECK(b.exponents == expected);
}

TEST_CASE("fit recovers polynomials that lie in the hypothesis space") {
    Rng rng(11);
    SUBCASE("y = 2 + 3x1 - x2^2") {
        const auto X = random_rows(2, 60, rng);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(2.0 + 3.0 * row[0] - row[1] * row[1]);
        const PolySurrogate m = fit(X, y, build_basis(2, 2));
        for (std::size_t i = 0; i < X.size(); ++i)
            CHECK(std::fabs(m.predict(X[i]) - y[i]) <= 1e-9);
        CHECK_FALSE(m.rank_deficient);
    }
    SUBCASE("constant target") {
        const auto X = random_rows(3, 40, rng);
        const std::vector<double> y(X.size(), 7.0);
        const PolySurrogate m = fit(X, y, build_basis(3, 1));
        const std::vector<double> probe = {0.3, 0.9, 0.1};
        CHECK(m.predict(probe) == doctest::Approx(7.0).epsilon(1e-10));
    }
    SUBCASE("rejects fewer rows than terms") {
        const auto X = random_rows(2, 4, rng);
        const std::vector<double> y(4, 1.0);
        CHECK_THROWS_AS(fit(X, y, build_basis(2, 2)), ValidationError);
    }
    SUBCASE("rank-deficient designs are flagged and still solved") {
        // A constant feature column collapses every monomial involving it.
        auto X = random_rows(2, 30, rng);
        for (auto& row : X) row[1] = 0.5;
        std::vector<double> y;
        for (const auto& row : X) y.push_back(1.0 + row[0]);
        const PolySurrogate m = fit(X, y, build_basis(2, 2));
        CHECK(m.rank_deficient);
        CHECK(m.design_rank < static_cast<int>(m.basis.size()));
        const std::vector<double> probe = {0.25, 0.5};
        CHECK(m.predict(probe) == doctest::Approx(1.25).epsilon(1e-8));
    }
}

TEST_CASE("predict") {
    PolySurrogate m;
    m.basis = build_basis(2, 2);
    m.coefficients.assign(m.basis.size(), 0.0);
    m.scaling = {{0.0, 1.0}, {0.0, 1.0}}; // identity scaling

    SUBCASE("all-zero coefficients") {
        CHECK(m.predict(std::vector<double>{2.0, 3.0}) == 0.0);
    }
    SUBCASE("constant-only model") {
        m.coefficients[0] = 5.0;
        CHECK(m.predict(std::vector<double>{123.0, -4.0}) == 5.0);
    }
    SUBCASE("single bilinear term") {
        // graded-lex for d=2, K=2: [00, 10, 01, 20, 11, 02]
        m.coefficients[4] = 1.0;
        CHECK(m.predict(std::vector<double>{2.0, 3.0}) == 6.0);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(m.predict(std::vector<double>{1.0}), ValidationError);
    }
}

TEST_CASE("mape and rmspe") {
    const std::vector<double> truth = {100.0, 200.0};
    CHECK(mape(truth, truth) == 0.0);
    CHECK(rmspe(truth, truth) == 0.0);

    const std::vector<double> pred = {110.0, 190.0};
    CHECK(mape(pred, truth) == doctest::Approx(7.5));
    CHECK(rmspe(pred, truth) == doctest::Approx(7.9056941504).epsilon(1e-9));

    CHECK_THROWS_AS(mape(pred, std::vector<double>{0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(rmspe(pred, std::vector<double>{1.0, 0.0}), ValidationError);

    SUBCASE("rmspe >= mape always") {
        Rng rng(3);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> t(10), p(10);
            for (int i = 0; i < 10; ++i) {
                t[i] = rng.uniform(0.5, 10.0);
                p[i] = t[i] * rng.uniform(0.5, 1.5);
            }
            CHECK(rmspe(p, t) >= mape(p, t) - 1e-12);
        }
    }
}

TEST_CASE("kfold_split") {
    SUBCASE("even folds") {
        const auto folds = kfold_split(10, 5, 1);
        CHECK(folds.size() == 5);
        for (const auto& f : folds) CHECK(f.size() == 2);
    }
    SUBCASE("uneven folds differ by at most one") {
        const auto folds = kfold_split(7, 3, 1);
        std::multiset<std::size_t> sizes;
        for (const auto& f : folds) sizes.insert(f.size());
        CHECK(sizes == std::multiset<std::size_t>{3, 2, 2});
    }
    SUBCASE("disjoint and covering") {
        const auto folds = kfold_split(23, 4, 99);
        std::set<std::size_t> all;
        std::size_t total = 0;
        for (const auto& f : folds) {
            all.insert(f.begin(), f.end());
            total += f.size();
        }
        CHECK(total == 23);
        CHECK(all.size() == 23);
        CHECK(*all.rbegin() == 22);
    }
    SUBCASE("deterministic per seed") {
        CHECK(kfold_split(20, 4, 5) == kfold_split(20, 4, 5));
        CHECK(kfold_split(20, 4, 5) != kfold_split(20, 4, 6));
    }
    SUBCASE("k out of range") {
        CHECK_THROWS_AS(kfold_split(5, 1, 0), ValidationError);
        CHECK_THROWS_AS(kfold_split(5, 6, 0), ValidationError);
    }
}

TEST_CASE("select_degree") {
    Rng rng(21);
    SUBCASE("noiseless degree-3 data chooses 3") {
        const RandomPoly poly = random_poly(3, 3, rng);
        const auto X = random_rows(3, 400, rng);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(poly.eval(row));
        const auto [k, report] = select_degree(X, y, {1, 2, 3, 4, 5}, 5, 17);
        CHECK(k == 3);
        CHECK(report.chosen_K == 3);
        CHECK(report.degrees.size() == 5);
        CHECK(report.heldout_mape <= 1e-6);
    }
    SUBCASE("constant data chooses the smallest degree") {
        const auto X = random_rows(2, 100, rng);
        const std::vector<double> y(X.size(), 4.5);
        const auto [k, report] = select_degree(X, y, {1, 2, 3}, 5, 17);
        CHECK(k == 1);
    }
    SUBCASE("degrees without enough rows are skipped with a note") {
        const auto X = random_rows(4, 40, rng);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(1.0 + row[0]);
        const auto [k, report] = select_degree(X, y, {1, 5}, 4, 17);
        CHECK(k == 1);
        REQUIRE(report.degrees.size() == 2);
        CHECK(report.degrees[1].skipped);
        CHECK(report.degrees[1].note.find("insufficient rows") != std::string::npos);
    }
    SUBCASE("all degrees skipped is an error") {
        const auto X = random_rows(4, 20, rng);
        const std::vector<double> y(X.size(), 1.0);
        CHECK_THROWS_AS(select_degree(X, y, {5}, 4, 17), ValidationError);
    }
}

TEST_CASE("exact recovery of random polynomials") {
    Rng rng(100);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng.bounded(4));
        const int K = 1 + static_cast<int>(rng.bounded(5));
        const RandomPoly poly = random_poly(d, K, rng);
        const std::size_t n = 3 * poly.basis.size() + 10;
        const auto X = random_rows(d, n, rng);
        std::vector<double> y;
        for (const auto& row : X) y.push_back(poly.eval(row));
        const PolySurrogate m = fit(X, y, build_basis(d, K));
        for (int probe = 0; probe < 50; ++probe) {
            std::vector<double> x(d);
            for (double& v : x) v = rng.uniform();
            const double truth = poly.eval(x);
            CHECK(std::fabs(m.predict(x) - truth) / std::fabs(truth) <= 1e-6);
        }
    }
}

TEST_CASE("feature scaling is internal and does not change predictions") {
    Rng rng(42);
    const RandomPoly poly = random_poly(3, 2, rng);
    auto X = random_rows(3, 80, rng);
    std::vector<double> y;
    for (const auto& row : X) y.push_back(poly.eval(row));

    // Affinely transformed copy of the same data.
    const double shift[3] = {10.0, -3.0, 100.0};
    const double scale[3] = {7.0, 0.25, 1000.0};
    auto X2 = X;
    for (auto& row : X2)
        for (int i = 0; i < 3; ++i) row[i] = row[i] * scale[i] + shift[i];

    const PolySurrogate m1 = fit(X, y, build_basis(3, 2));
    const PolySurrogate m2 = fit(X2, y, build_basis(3, 2));
    for (int probe = 0; probe < 100; ++probe) {
        std::vector<double> x(3), x2(3);
        for (int i = 0; i < 3; ++i) {
            x[i] = rng.uniform();
            x2[i] = x[i] * scale[i] + shift[i];
        }
        const double p1 = m1.predict(x);
        const double p2 = m2.predict(x2);
        CHECK(std::fabs(p1 - p2) / std::fabs(p1) <= 1e-6);
    }
}

TEST_CASE("fit is permutation-invariant over training rows") {
    Rng rng(43);
    const RandomPoly poly = random_poly(2, 2, rng);
    auto X = random_rows(2, 50, rng);
    std::vector<double> y;
    for (const auto& row : X) y.push_back(poly.eval(row));

    std::vector<std::size_t> perm(X.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::vector<double>> Xp;
    std::vector<double> yp;
    for (std::size_t i : perm) {
        Xp.push_back(X[i]);
        yp.push_back(y[i]);
    }

    const PolySurrogate m1 = fit(X, y, build_basis(2, 2));
    const PolySurrogate m2 = fit(Xp, yp, build_basis(2, 2));
    for (int probe = 0; probe < 50; ++probe) {
        std::vector<double> x = {rng.uniform(), rng.uniform()};
        CHECK(m1.predict(x) == doctest::Approx(m2.predict(x)).epsilon(1e-9));
    }
}

TEST_CASE("model persistence") {
    Rng rng(44);
    const RandomPoly poly = random_poly(3, 2, rng);
    const auto X = random_rows(3, 60, rng);
    std::vector<double> y;
    for (const auto& row : X) y.push_back(poly.eval(row));
    const PolySurrogate m = fit(X, y, build_basis(3, 2), "power", PeType::LightPE1);

    const std::string text = serialize(m);
    const PolySurrogate loaded = load_surrogate(text);
    CHECK(loaded.target == "power");
    CHECK(loaded.pe_type == PeType::LightPE1);
    for (int probe = 0; probe < 20; ++probe) {
        std::vector<double> x = {rng.uniform(), rng.uniform(), rng.uniform()};
        CHECK(loaded.predict(x) == m.predict(x));
    }

    SUBCASE("count validation on load") {
        std::string broken = text;
        const auto pos = broken.find("\"coefficients\": [");
        REQUIRE(pos != std::string::npos);
        broken.insert(pos + std::string("\"coefficients\": [").size(), "1.5, ");
        CHECK_THROWS_AS(load_surrogate(broken), ValidationError);
    }
}
