// surrogate.hpp
//
// Multivariate polynomial regression models F(x) = sum_j c_j prod_i x_i^q_ij
// with total degree bounded by K, fit by minimum-norm least squares, plus
// MAPE/RMSPE metrics and k-fold cross-validated degree selection. One model
// is fit per (target, PE type). Features are affinely scaled to [0,1] per
// dimension before monomial expansion; the scaling is internal and recorded
// with the model, so predictions are expressed over raw features.

#ifndef QADSE_SURROGATE_HPP
#define QADSE_SURROGATE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qadse/common.hpp"
#include "qadse/model.hpp"

namespace qadse {

std::uint64_t binomial(unsigned n, unsigned k);

// All exponent vectors with total degree <= K over d variables, in graded
// lexicographic order: ascending total degree, lexicographically descending
// within a degree. Term count is C(d+K, K); the constant term comes first.
struct MonomialBasis {
    int d = 0;
    int K = 0;
    std::vector<std::vector<int>> exponents;

    std::size_t size() const { return exponents.size(); }
};

MonomialBasis build_basis(int d, int K);

struct FeatureScaling {
    double shift = 0.0;
    double scale = 1.0; // scaled = (x - shift) * scale; 0 marks a constant feature
};

struct PolySurrogate {
    MonomialBasis basis;
    std::vector<double> coefficients;
    std::vector<FeatureScaling> scaling;
    std::string target;             // "power" | "area" | "latency"
    PeType pe_type = PeType::FP32;

    // Fit diagnostics (not persisted).
    int design_rank = -1;
    bool rank_deficient = false;

    double predict(std::span<const double> x) const;
};

// Minimum-norm least squares over the monomial design matrix (orthogonal
// decomposition, no iterative randomness). Requires at least as many rows as
// basis terms; a rank-deficient design is still solved and flagged.
PolySurrogate fit(const std::vector<std::vector<double>>& X,
                  const std::vector<double>& y, const MonomialBasis& basis,
                  std::string target = "", PeType pe_type = PeType::FP32);

// Percentage errors; reject any zero truth value.
double mape(std::span<const double> pred, std::span<const double> truth);
double rmspe(std::span<const double> pred, std::span<const double> truth);

// k disjoint index sets covering 0..n-1 with sizes differing by at most one;
// deterministic per seed.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                  std::uint64_t seed);

struct DegreeEntry {
    int K = 0;
    double cv_mape = 0.0;
    double cv_rmspe = 0.0;
    bool skipped = false;
    std::string note;
};

struct FitReport {
    std::vector<DegreeEntry> degrees;
    int chosen_K = -1;
    double heldout_mape = 0.0;
    double heldout_rmspe = 0.0;
    std::string note;
};

// Cross-validated degree selection. A 20% holdout is split off first; CV
// runs over the remaining pool. The chosen K is the smallest whose CV MAPE
// and CV RMSPE are both within 1% relative of their respective minima (with
// a tiny absolute guard for noiseless ties at zero). Degrees with too few
// rows for their basis are skipped with a note; all skipped is an error.
std::pair<int, FitReport> select_degree(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y,
                                        const std::vector<int>& k_range, int folds,
                                        std::uint64_t seed);

std::string serialize(const PolySurrogate& model);
PolySurrogate load_surrogate(const std::string& text);

} // namespace qadse

#endif
