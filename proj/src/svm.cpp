#include <algorithm>
#include <cmath>
#include <vector>

#include "dsw/error.hpp"
#include "dsw/models.hpp"
#include "dsw/rng.hpp"

namespace dsw::models {

namespace {

constexpr int kMaxSweeps = 10000;
constexpr double kMinAlphaStep = 1e-5;

}  // namespace

double SvmModel::decision_value(const std::vector<double>& row) const {
    double value = bias;
    for (std::size_t k = 0; k < support_vectors.size(); ++k)
        value += coefficients[k] * kernel_eval(params.kernel, gamma, support_vectors[k], row);
    return value;
}

// Soft-margin dual via sequential minimal optimization: random-partner
// pairwise updates against the KKT conditions, terminating after max_passes
// consecutive sweeps without a change.
FittedModel fit_svm(const Matrix& X, const Labels& y, const SvmParams& params,
                    std::vector<std::string> feature_keys) {
    if (X.empty()) throw Error(Errc::EmptyTrainingSet, "no training rows");
    if (X.size() != y.size())
        throw Error(Errc::DimensionMismatch, "label count does not match row count");
    const std::size_t d = X.front().size();
    if (d == 0) throw Error(Errc::DimensionMismatch, "rows have no features");
    for (const auto& row : X) {
        if (row.size() != d) throw Error(Errc::DimensionMismatch, "ragged training matrix");
    }
    if (params.gamma && !(*params.gamma > 0.0))
        throw Error(Errc::BadSpec, "gamma must be > 0 or auto");
    if (!(params.C > 0.0)) throw Error(Errc::BadSpec, "C must be > 0");
    if (!(params.tolerance > 0.0)) throw Error(Errc::BadSpec, "tolerance must be > 0");
    if (params.max_passes < 1) throw Error(Errc::BadSpec, "max_passes must be >= 1");

    const std::size_t n = X.size();
    std::vector<double> sign(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] != 0 && y[i] != 1) throw Error(Errc::BadArgs, "labels must be 0 or 1");
        sign[i] = y[i] == 1 ? 1.0 : -1.0;
        pos += static_cast<std::size_t>(y[i]);
    }
    if (pos == 0 || pos == n)
        throw Error(Errc::SingleClassTraining, "SVM needs both classes in training data");

    const double gamma = params.gamma.value_or(1.0 / static_cast<double>(d));
    const double C = params.C;

    // full kernel cache; training sets here are small
    std::vector<std::vector<double>> K(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernel_eval(params.kernel, gamma, X[i], X[j]);
            K[i][j] = v;
            K[j][i] = v;
        }
    }

    std::vector<double> alpha(n, 0.0);
    double b = 0.0;

    auto decision = [&](std::size_t i) {
        double value = b;
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] != 0.0) value += alpha[j] * sign[j] * K[j][i];
        }
        return value;
    };

    Rng rng(params.seed);
    int passes = 0;
    int sweeps = 0;
    while (passes < params.max_passes && sweeps < kMaxSweeps) {
        ++sweeps;
        int changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double err_i = decision(i) - sign[i];
            const bool violates = (sign[i] * err_i < -params.tolerance && alpha[i] < C) ||
                                  (sign[i] * err_i > params.tolerance && alpha[i] > 0.0);
            if (!violates) continue;

            std::size_t j = static_cast<std::size_t>(rng.below(n - 1));
            if (j >= i) ++j;
            const double err_j = decision(j) - sign[j];

            const double alpha_i_old = alpha[i];
            const double alpha_j_old = alpha[j];
            double low, high;
            if (sign[i] != sign[j]) {
                low = std::max(0.0, alpha_j_old - alpha_i_old);
                high = std::min(C, C + alpha_j_old - alpha_i_old);
            } else {
                low = std::max(0.0, alpha_i_old + alpha_j_old - C);
                high = std::min(C, alpha_i_old + alpha_j_old);
            }
            if (low >= high) continue;

            const double eta = 2.0 * K[i][j] - K[i][i] - K[j][j];
            if (eta >= 0.0) continue;

            double alpha_j_new =
                std::clamp(alpha_j_old - sign[j] * (err_i - err_j) / eta, low, high);
            if (std::abs(alpha_j_new - alpha_j_old) < kMinAlphaStep) continue;
            const double alpha_i_new =
                alpha_i_old + sign[i] * sign[j] * (alpha_j_old - alpha_j_new);

            alpha[i] = alpha_i_new;
            alpha[j] = alpha_j_new;

            const double b1 = b - err_i - sign[i] * (alpha_i_new - alpha_i_old) * K[i][i] -
                              sign[j] * (alpha_j_new - alpha_j_old) * K[i][j];
            const double b2 = b - err_j - sign[i] * (alpha_i_new - alpha_i_old) * K[i][j] -
                              sign[j] * (alpha_j_new - alpha_j_old) * K[j][j];
            if (alpha_i_new > 0.0 && alpha_i_new < C) b = b1;
            else if (alpha_j_new > 0.0 && alpha_j_new < C) b = b2;
            else b = (b1 + b2) / 2.0;
            ++changed;
        }
        passes = changed == 0 ? passes + 1 : 0;
    }

    SvmModel svm;
    svm.params = params;
    svm.gamma = gamma;
    svm.bias = b;
    svm.sweeps = sweeps;
    svm.converged = passes >= params.max_passes;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            svm.support_vectors.push_back(X[i]);
            svm.coefficients.push_back(alpha[i] * sign[i]);
        }
    }

    FittedModel model;
    model.impl = std::move(svm);
    model.n_features = d;
    model.feature_keys = std::move(feature_keys);
    model.seed = params.seed;
    return model;
}

}  // namespace dsw::models
