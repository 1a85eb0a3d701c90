#include "rides/regress.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rides/errors.hpp"

namespace rides {

double RegressionModel::predict(const std::vector<double>& x) const {
    double v = coefficients[0];
    for (std::size_t j = 0; j < x.size(); ++j) v += coefficients[j + 1] * x[j];
    return v;
}

RegressionModel fit_ols(const std::vector<std::vector<double>>& X,
                        const std::vector<double>& y) {
    const int n = static_cast<int>(X.size());
    if (n == 0) throw DataError("empty design matrix");
    const int p = static_cast<int>(X[0].size());
    if (static_cast<int>(y.size()) != n) throw DataError("design/target length mismatch");
    if (n <= p + 1) throw DataError("too few samples for " + std::to_string(p) + " predictors");

    Eigen::MatrixXd Xm(n, p);
    Eigen::VectorXd yv(n);
    for (int i = 0; i < n; ++i) {
        yv(i) = y[i];
        for (int j = 0; j < p; ++j) Xm(i, j) = X[i][j];
    }

    // z-score predictors; constant columns are rank-deficient by definition
    Eigen::VectorXd mu = Xm.colwise().mean();
    Eigen::VectorXd sd(p);
    for (int j = 0; j < p; ++j) {
        double s = std::sqrt((Xm.col(j).array() - mu(j)).square().sum() / std::max(n - 1, 1));
        sd(j) = s;
        if (s == 0.0)
            throw DataError("singular design: column " + std::to_string(j) + " is constant");
    }
    Eigen::MatrixXd Z(n, p + 1);
    Z.col(0).setOnes();
    for (int j = 0; j < p; ++j) Z.col(j + 1) = (Xm.col(j).array() - mu(j)) / sd(j);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    if (qr.rank() < p + 1) {
        std::string cols;
        // identify columns involved in the deficiency by pivot order
        for (int j = qr.rank(); j < p + 1; ++j) {
            if (!cols.empty()) cols += ",";
            cols += std::to_string(qr.colsPermutation().indices()(j) - 1);
        }
        throw DataError("singular design: dependent columns {" + cols + "}");
    }
    Eigen::VectorXd beta_std = qr.solve(yv);
    Eigen::VectorXd fitted = Z * beta_std;
    Eigen::VectorXd resid = yv - fitted;

    RegressionModel m;
    m.n_samples = n;
    m.n_predictors = p;
    m.coefficients_std.assign(beta_std.data(), beta_std.data() + p + 1);

    // back-transform to original units
    m.coefficients.resize(p + 1);
    double intercept = beta_std(0);
    for (int j = 0; j < p; ++j) {
        m.coefficients[j + 1] = beta_std(j + 1) / sd(j);
        intercept -= beta_std(j + 1) * mu(j) / sd(j);
    }
    m.coefficients[0] = intercept;

    const double ybar = yv.mean();
    const double ss_tot = (yv.array() - ybar).square().sum();
    const double ss_res = resid.squaredNorm();
    const double ss_reg = ss_tot - ss_res;
    m.anova.ss_total = ss_tot;
    m.anova.ss_residual = ss_res;
    m.anova.ss_regression = ss_reg;
    m.anova.df_regression = p;
    m.anova.df_residual = n - p - 1;
    m.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    m.adjusted_r2 = 1.0 - (1.0 - m.r2) * (n - 1) / static_cast<double>(n - p - 1);
    const double mse = ss_res / m.anova.df_residual;
    m.anova.f_statistic = mse > 0 ? (ss_reg / p) / mse : 0.0;

    // standard errors in original units via (X'X)^-1 on the intercept+raw design
    Eigen::MatrixXd D(n, p + 1);
    D.col(0).setOnes();
    D.rightCols(p) = Xm;
    Eigen::MatrixXd cov = mse * (D.transpose() * D).inverse();
    m.std_errors.resize(p + 1);
    m.t_stats.resize(p + 1);
    for (int j = 0; j <= p; ++j) {
        m.std_errors[j] = std::sqrt(std::max(cov(j, j), 0.0));
        m.t_stats[j] = m.std_errors[j] > 0 ? m.coefficients[j] / m.std_errors[j] : 0.0;
    }
    m.residuals.assign(resid.data(), resid.data() + n);
    return m;
}

Design build_design(const std::vector<Timestamp>& window_starts,
                    const std::vector<FeatureVector>& features,
                    const std::vector<double>& utilization, const ForecastSpec& spec,
                    std::int64_t step_s) {
    const std::size_t n = window_starts.size();
    if (features.size() != n || utilization.size() != n)
        throw DataError("misaligned feature/utilization series");
    if (step_s <= 0) throw ConfigError("window step must be positive");
    if (spec.horizon_s % step_s != 0)
        throw ConfigError("horizon must be a multiple of the window step");
    const std::size_t shift = static_cast<std::size_t>(spec.horizon_s / step_s);
    if (shift >= n) throw DataError("horizon leaves no samples");

    double u_mean = std::accumulate(utilization.begin(), utilization.end(), 0.0) /
                    static_cast<double>(n);
    Design d;
    d.feature_names = {"n_nodes",       "n_edges",   "density",         "avg_betweenness",
                       "avg_closeness", "avg_eigenvector"};
    if (spec.include_lambda) d.feature_names.push_back("largest_eigenvalue");
    const int p = static_cast<int>(d.feature_names.size());
    for (std::size_t t = 0; t + shift < n; ++t) {
        std::vector<double> row(p);
        for (int j = 0; j < p; ++j) row[j] = features[t][j];
        d.X.push_back(std::move(row));
        d.window_start.push_back(window_starts[t]);
        if (spec.target_mode == TargetMode::Level) {
            d.y.push_back(utilization[t + shift]);
        } else {
            double delta = utilization[t + shift] - utilization[t];
            d.y.push_back(u_mean > 0 ? delta / u_mean * 100.0 : 0.0);
        }
    }
    return d;
}

HorizonSweep horizon_sweep(const std::vector<Timestamp>& window_starts,
                           const std::vector<FeatureVector>& features,
                           const std::vector<double>& utilization,
                           const std::vector<std::int64_t>& horizons_s,
                           const ForecastSpec& spec, std::int64_t step_s) {
    HorizonSweep sweep(horizons_s.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < horizons_s.size(); ++i) {
        HorizonEntry e;
        e.horizon_s = horizons_s[i];
        try {
            ForecastSpec s = spec;
            s.horizon_s = horizons_s[i];
            auto d = build_design(window_starts, features, utilization, s, step_s);
            auto m = fit_ols(d.X, d.y);
            e.r2 = m.r2;
            e.adjusted_r2 = m.adjusted_r2;
        } catch (const std::exception& ex) {
            e.failed = true;
            e.error = ex.what();
        }
        sweep[i] = e;
    }
    return sweep;
}

ValidationReport split_validate(const std::vector<Timestamp>& window_starts,
                                const std::vector<FeatureVector>& features,
                                const std::vector<double>& utilization,
                                Timestamp split_point, const ForecastSpec& spec,
                                std::int64_t step_s) {
    auto d = build_design(window_starts, features, utilization, spec, step_s);
    std::vector<std::vector<double>> Xtr, Xva;
    std::vector<double> ytr, yva;
    for (std::size_t i = 0; i < d.X.size(); ++i) {
        if (d.window_start[i] < split_point) {
            Xtr.push_back(d.X[i]);
            ytr.push_back(d.y[i]);
        } else {
            Xva.push_back(d.X[i]);
            yva.push_back(d.y[i]);
        }
    }
    if (Xtr.empty() || Xva.empty())
        throw ConfigError("split point leaves an empty train or validation side");

    ValidationReport r;
    r.train = fit_ols(Xtr, ytr);
    r.n_train = static_cast<int>(Xtr.size());
    r.n_validation = static_cast<int>(Xva.size());
    double ybar = std::accumulate(yva.begin(), yva.end(), 0.0) / yva.size();
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < Xva.size(); ++i) {
        double pred = r.train.predict(Xva[i]);
        r.predicted.push_back(pred);
        r.observed.push_back(yva[i]);
        ss_tot += (yva[i] - ybar) * (yva[i] - ybar);
        ss_res += (yva[i] - pred) * (yva[i] - pred);
    }
    r.validation_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    return r;
}

}  // namespace rides
