#pragma once

#include <Eigen/Dense>

#include "sleq/core.hpp"
#include "sleq/rng.hpp"

namespace sleq {

/// Exact sampler for a finite Gaussian vector. Cholesky when the matrix is
/// cleanly positive definite, otherwise an eigenvalue factorization with
/// small negative eigenvalues clipped to zero (counted as warnings).
class GaussianSampler {
  public:
    GaussianSampler() = default;

    GaussianSampler(Eigen::MatrixXd cov, Eigen::VectorXd mean)
        : mean_(std::move(mean)) {
        const auto n = cov.rows();
        if (n != cov.cols() || n != mean_.size())
            throw model_error("covariance and mean dimensions disagree");
        if (n == 0) return;

        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success) {
            factor_ = llt.matrixL();
            return;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success)
            throw model_error("eigenvalue factorization failed");
        Eigen::VectorXd lam = es.eigenvalues();
        double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < n; ++i) {
            if (lam[i] < -1e-6 * scale)
                throw model_error("covariance is not positive semi-definite");
            if (lam[i] < -1e-9) ++clip_warnings_;
            if (lam[i] < 0.0) lam[i] = 0.0;
        }
        factor_ = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    }

    Eigen::Index size() const { return mean_.size(); }
    int clip_warnings() const { return clip_warnings_; }
    const Eigen::VectorXd& mean() const { return mean_; }

    /// One draw; consumes size() normals from the generator in index order.
    Eigen::VectorXd sample(Rng& rng) const {
        Eigen::VectorXd xi(size());
        for (Eigen::Index i = 0; i < size(); ++i) xi[i] = rng.normal();
        if (size() == 0) return xi;
        return mean_ + factor_ * xi;
    }

  private:
    Eigen::MatrixXd factor_;
    Eigen::VectorXd mean_;
    int clip_warnings_ = 0;
};

/// Clip small negative eigenvalues to zero; returns the repaired matrix and
/// the number of eigenvalues below the warning threshold.
inline std::pair<Eigen::MatrixXd, int> psd_clip(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd lam = es.eigenvalues();
    int warn = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -1e-9) ++warn;
        if (lam[i] < 0.0) lam[i] = 0.0;
    }
    Eigen::MatrixXd repaired =
        es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    return {repaired, warn};
}

}  // namespace sleq
