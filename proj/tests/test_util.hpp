// Shared test helpers. The Lanczos routine here is deliberately test-local and
// minimal (fixed start vector, no restarts) so that library results are
// checked against an independently written path.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace testutil {

/// Lowest eigenvalue of a symmetric operator given only its matvec, via
/// fully reorthogonalized Lanczos from a fixed deterministic start vector.
/// Intended for matrices whose lowest eigenvalue is well separated (ground
/// states of the models under test).
inline double lowest_eigenvalue(
    int dim, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
    int max_iters = 300) {
    using Eigen::VectorXd;
    if (dim == 1) {
        VectorXd x = VectorXd::Ones(1), y(1);
        apply(x, y);
        return y[0];
    }
    VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = 1.0 + 0.1 * (i % 7); // fixed, generic
    v.normalize();

    const int m = std::min(dim, max_iters);
    std::vector<VectorXd> basis;
    basis.reserve(m);
    std::vector<double> alpha, beta;
    VectorXd w(dim);
    for (int j = 0; j < m; ++j) {
        basis.push_back(v);
        apply(v, w);
        const double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (j > 0) w -= beta.back() * basis[j - 1];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) w -= b.dot(w) * b;
        const double nb = w.norm();
        if (nb < 1e-12) break;
        beta.push_back(nb);
        v = w / nb;
    }

    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

/// Lowest eigenvalue of a dense symmetric matrix: direct solve when small,
/// the Lanczos helper above otherwise.
inline double lowest_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() <= 2048)
        return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    return lowest_eigenvalue(static_cast<int>(m.rows()),
                             [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                                 y.noalias() = m * x;
                             });
}

} // namespace testutil
