#include "qadse/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <json.hpp>

#include "qadse/rng.hpp"

namespace qadse {

using ordered_json = nlohmann::ordered_json;

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i; // exact: r*(n-k+i) is divisible by i here
    }
    return r;
}

namespace {

void gen_exact_degree(int d, int degree, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
    const int pos = static_cast<int>(current.size());
    if (pos == d - 1) {
        current.push_back(degree);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        current.push_back(e);
        gen_exact_degree(d, degree - e, current, out);
        current.pop_back();
    }
}

} // namespace

MonomialBasis build_basis(int d, int K) {
    if (d < 1) throw ValidationError("basis dimension must be >= 1");
    if (K < 0) throw ValidationError("basis degree must be >= 0");
    MonomialBasis basis;
    basis.d = d;
    basis.K = K;
    basis.exponents.reserve(static_cast<std::size_t>(binomial(d + K, K)));
    std::vector<int> current;
    for (int g = 0; g <= K; ++g) gen_exact_degree(d, g, current, basis.exponents);
    return basis;
}

namespace {

std::vector<double> scale_row(std::span<const double> x,
                              const std::vector<FeatureScaling>& scaling) {
    std::vector<double> s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        s[i] = (x[i] - scaling[i].shift) * scaling[i].scale;
    return s;
}

double eval_monomials_dot(const MonomialBasis& basis,
                          const std::vector<double>& coef,
                          const std::vector<double>& scaled) {
    // Precompute powers per feature up to K.
    const int d = basis.d, K = basis.K;
    std::vector<double> powers(static_cast<std::size_t>(d) * (K + 1));
    for (int i = 0; i < d; ++i) {
        powers[static_cast<std::size_t>(i) * (K + 1)] = 1.0;
        for (int e = 1; e <= K; ++e)
            powers[static_cast<std::size_t>(i) * (K + 1) + e] =
                powers[static_cast<std::size_t>(i) * (K + 1) + e - 1] * scaled[i];
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < basis.exponents.size(); ++j) {
        double term = 1.0;
        const std::vector<int>& q = basis.exponents[j];
        for (int i = 0; i < d; ++i)
            if (q[i] != 0) term *= powers[static_cast<std::size_t>(i) * (K + 1) + q[i]];
        sum += coef[j] * term;
    }
    return sum;
}

} // namespace

double PolySurrogate::predict(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != basis.d)
        throw ValidationError("feature vector has dimension " +
                              std::to_string(x.size()) + ", model expects " +
                              std::to_string(basis.d));
    return eval_monomials_dot(basis, coefficients, scale_row(x, scaling));
}

PolySurrogate fit(const std::vector<std::vector<double>>& X,
                  const std::vector<double>& y, const MonomialBasis& basis,
                  std::string target, PeType pe_type) {
    const std::size_t n = X.size();
    const std::size_t terms = basis.size();
    if (n != y.size()) throw ValidationError("feature/target row count mismatch");
    if (n < terms)
        throw ValidationError("fit requires at least " + std::to_string(terms) +
                              " rows for " + std::to_string(terms) + " terms, got " +
                              std::to_string(n));
    for (double v : y)
        if (!std::isfinite(v)) throw ValidationError("targets must be finite");

    const int d = basis.d;
    PolySurrogate model;
    model.basis = basis;
    model.target = std::move(target);
    model.pe_type = pe_type;

    // Per-feature affine scaling to [0,1] over the training data.
    model.scaling.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& row : X) {
            if (static_cast<int>(row.size()) != d)
                throw ValidationError("feature row has wrong dimension");
            lo = std::min(lo, row[i]);
            hi = std::max(hi, row[i]);
        }
        model.scaling[i].shift = lo;
        model.scaling[i].scale = hi > lo ? 1.0 / (hi - lo) : 0.0;
    }

    Eigen::MatrixXd A(n, terms);
    const int K = basis.K;
    std::vector<double> powers(static_cast<std::size_t>(d) * (K + 1));
    for (std::size_t r = 0; r < n; ++r) {
        const std::vector<double> scaled = scale_row(X[r], model.scaling);
        for (int i = 0; i < d; ++i) {
            powers[static_cast<std::size_t>(i) * (K + 1)] = 1.0;
            for (int e = 1; e <= K; ++e)
                powers[static_cast<std::size_t>(i) * (K + 1) + e] =
                    powers[static_cast<std::size_t>(i) * (K + 1) + e - 1] * scaled[i];
        }
        for (std::size_t j = 0; j < terms; ++j) {
            double term = 1.0;
            const std::vector<int>& q = basis.exponents[j];
            for (int i = 0; i < d; ++i)
                if (q[i] != 0)
                    term *= powers[static_cast<std::size_t>(i) * (K + 1) + q[i]];
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = term;
        }
    }
    Eigen::VectorXd b(n);
    for (std::size_t r = 0; r < n; ++r) b(static_cast<Eigen::Index>(r)) = y[r];

    // Complete orthogonal decomposition: minimum-norm least-squares solution,
    // deterministic, rank-revealing.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const Eigen::VectorXd c = cod.solve(b);

    model.coefficients.assign(c.data(), c.data() + c.size());
    model.design_rank = static_cast<int>(cod.rank());
    model.rank_deficient = model.design_rank < static_cast<int>(terms);
    return model;
}

double mape(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size() || truth.empty())
        throw ValidationError("mape requires equal-sized non-empty inputs");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 0.0) throw ValidationError("mape undefined for zero truth value");
        sum += std::fabs((pred[i] - truth[i]) / truth[i]);
    }
    return 100.0 * sum / static_cast<double>(truth.size());
}

double rmspe(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size() || truth.empty())
        throw ValidationError("rmspe requires equal-sized non-empty inputs");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 0.0) throw ValidationError("rmspe undefined for zero truth value");
        const double rel = (pred[i] - truth[i]) / truth[i];
        sum += rel * rel;
    }
    return 100.0 * std::sqrt(sum / static_cast<double>(truth.size()));
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                  std::uint64_t seed) {
    if (k < 2 || static_cast<std::size_t>(k) > n)
        throw ValidationError("kfold requires 2 <= k <= n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
        folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
    return folds;
}

std::pair<int, FitReport> select_degree(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y,
                                        const std::vector<int>& k_range, int folds,
                                        std::uint64_t seed) {
    if (k_range.empty()) throw ValidationError("degree range is empty");
    if (X.empty() || X.size() != y.size())
        throw ValidationError("select_degree requires matching non-empty rows");
    const int d = static_cast<int>(X[0].size());

    Rng rng(seed);
    std::vector<std::size_t> order(X.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t holdout_n = X.size() / 5;
    std::vector<std::size_t> heldout(order.begin(), order.begin() + holdout_n);
    std::vector<std::size_t> pool(order.begin() + holdout_n, order.end());
    std::sort(heldout.begin(), heldout.end());
    std::sort(pool.begin(), pool.end());

    auto gather = [&](const std::vector<std::size_t>& rows,
                      std::vector<std::vector<double>>& gx, std::vector<double>& gy) {
        gx.clear();
        gy.clear();
        for (std::size_t r : rows) {
            gx.push_back(X[r]);
            gy.push_back(y[r]);
        }
    };

    const std::uint64_t fold_seed = rng.fork();
    const auto fold_sets = kfold_split(pool.size(), folds, fold_seed);
    std::size_t max_fold = 0;
    for (const auto& fs : fold_sets) max_fold = std::max(max_fold, fs.size());

    FitReport report;
    std::vector<int> sorted_range = k_range;
    std::sort(sorted_range.begin(), sorted_range.end());

    for (int K : sorted_range) {
        DegreeEntry entry;
        entry.K = K;
        const std::uint64_t terms = binomial(static_cast<unsigned>(d + K),
                                             static_cast<unsigned>(K));
        if (pool.size() - max_fold < terms) {
            entry.skipped = true;
            entry.note = "insufficient rows (" + std::to_string(pool.size() - max_fold) +
                         " train rows for " + std::to_string(terms) + " terms)";
            entry.cv_mape = std::numeric_limits<double>::quiet_NaN();
            entry.cv_rmspe = std::numeric_limits<double>::quiet_NaN();
            report.degrees.push_back(std::move(entry));
            continue;
        }
        const MonomialBasis basis = build_basis(d, K);
        std::vector<double> cv_pred(pool.size()), cv_truth(pool.size());
        std::size_t cursor = 0;
        for (const auto& fold : fold_sets) {
            std::vector<std::size_t> train_rows;
            train_rows.reserve(pool.size() - fold.size());
            std::vector<bool> in_fold(pool.size(), false);
            for (std::size_t i : fold) in_fold[i] = true;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (!in_fold[i]) train_rows.push_back(pool[i]);

            std::vector<std::vector<double>> tx;
            std::vector<double> ty;
            gather(train_rows, tx, ty);
            const PolySurrogate m = fit(tx, ty, basis);
            for (std::size_t i : fold) {
                cv_pred[cursor] = m.predict(X[pool[i]]);
                cv_truth[cursor] = y[pool[i]];
                ++cursor;
            }
        }
        entry.cv_mape = mape(cv_pred, cv_truth);
        entry.cv_rmspe = rmspe(cv_pred, cv_truth);
        report.degrees.push_back(std::move(entry));
    }

    double min_mape = std::numeric_limits<double>::infinity();
    double min_rmspe = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& e : report.degrees) {
        if (e.skipped) continue;
        any = true;
        min_mape = std::min(min_mape, e.cv_mape);
        min_rmspe = std::min(min_rmspe, e.cv_rmspe);
    }
    if (!any) throw ValidationError("all degrees skipped: not enough rows");

    // Smallest K within 1% relative of both minima. The absolute term absorbs
    // float dust when the minima are at (numerical) zero.
    constexpr double kRel = 1.01;
    constexpr double kAbs = 1e-12;
    int chosen = -1;
    for (const auto& e : report.degrees) {
        if (e.skipped) continue;
        if (e.cv_mape <= min_mape * kRel + kAbs && e.cv_rmspe <= min_rmspe * kRel + kAbs) {
            chosen = e.K;
            break;
        }
    }
    if (chosen < 0) {
        // No degree is near-optimal for both metrics at once; fall back to the
        // best combined relative score.
        double best_score = std::numeric_limits<double>::infinity();
        for (const auto& e : report.degrees) {
            if (e.skipped) continue;
            const double score = e.cv_mape / std::max(min_mape, kAbs) +
                                 e.cv_rmspe / std::max(min_rmspe, kAbs);
            if (score < best_score) {
                best_score = score;
                chosen = e.K;
            }
        }
        report.note = "no degree within 1% of both minima; chose best combined score";
    }
    report.chosen_K = chosen;

    // Refit on the pool at the chosen degree and score the holdout.
    std::vector<std::vector<double>> px;
    std::vector<double> py;
    gather(pool, px, py);
    const PolySurrogate final_model = fit(px, py, build_basis(d, chosen));
    if (!heldout.empty()) {
        std::vector<double> hp, ht;
        hp.reserve(heldout.size());
        ht.reserve(heldout.size());
        for (std::size_t r : heldout) {
            hp.push_back(final_model.predict(X[r]));
            ht.push_back(y[r]);
        }
        report.heldout_mape = mape(hp, ht);
        report.heldout_rmspe = rmspe(hp, ht);
    } else {
        report.heldout_mape = std::numeric_limits<double>::quiet_NaN();
        report.heldout_rmspe = std::numeric_limits<double>::quiet_NaN();
    }
    return {chosen, report};
}

std::string serialize(const PolySurrogate& model) {
    ordered_json j;
    j["schema_version"] = 1;
    j["target"] = model.target;
    j["pe_type"] = to_string(model.pe_type);
    j["d"] = model.basis.d;
    j["K"] = model.basis.K;
    j["exponents"] = model.basis.exponents;
    j["coefficients"] = model.coefficients;
    j["scaling"] = ordered_json::array();
    for (const FeatureScaling& s : model.scaling)
        j["scaling"].push_back(ordered_json::array({s.shift, s.scale}));
    return j.dump(2) + "\n";
}

PolySurrogate load_surrogate(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("malformed JSON in surrogate model");
    for (const char* field : {"target", "pe_type", "d", "K", "exponents",
                              "coefficients", "scaling"})
        if (!j.contains(field))
            throw ValidationError(std::string("surrogate model: missing field \"") +
                                  field + "\"");

    PolySurrogate model;
    model.target = j.at("target").get<std::string>();
    model.pe_type = pe_type_from_string(j.at("pe_type").get<std::string>());
    const int d = j.at("d").get<int>();
    const int K = j.at("K").get<int>();
    model.basis = build_basis(d, K);

    const auto& exps = j.at("exponents");
    if (exps.size() != model.basis.size())
        throw ValidationError("surrogate model: exponent count " +
                              std::to_string(exps.size()) + " does not match C(d+K,K) = " +
                              std::to_string(model.basis.size()));
    for (std::size_t i = 0; i < model.basis.size(); ++i)
        if (exps[i].get<std::vector<int>>() != model.basis.exponents[i])
            throw ValidationError("surrogate model: exponents are not in graded-lex order");

    model.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (model.coefficients.size() != model.basis.size())
        throw ValidationError("surrogate model: coefficient count does not match basis");

    const auto& sc = j.at("scaling");
    if (sc.size() != static_cast<std::size_t>(d))
        throw ValidationError("surrogate model: scaling count does not match d");
    for (const auto& pair : sc) {
        if (!pair.is_array() || pair.size() != 2)
            throw ValidationError("surrogate model: scaling entries must be [shift, scale]");
        model.scaling.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return model;
}

} // namespace qadse
