#include "ectl/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ectl/errors.hpp"

namespace ectl {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat solve_discrete_lyapunov(const Mat& a, const Mat& q) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || q.rows() != n || q.cols() != n)
        throw LengthMismatch("solve_discrete_lyapunov: dimension mismatch");

    Mat at = a.transpose();
    Mat m = Mat::Identity(n * n, n * n) - kron(at, at);
    Vec vec_q(n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) vec_q[j * n + i] = q(i, j);

    Eigen::PartialPivLU<Mat> lu(m);
    // PartialPivLU has no rank query; a vanishing diagonal entry of U marks
    // the singular case.
    double umin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    double umax = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
    if (umin <= 1e-14 * std::max(1.0, umax))
        throw NotSchur("solve_discrete_lyapunov: singular vectorized system");

    Vec vec_p = lu.solve(vec_q);
    Mat p(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) p(i, j) = vec_p[j * n + i];
    p = ((p + p.transpose()) / 2.0).eval();

    double residual = (at * p * a - p + q).norm();
    if (residual > 1e-9 * p.norm())
        throw NotSchur("solve_discrete_lyapunov: residual too large");

    Vec eigs = symmetric_eigenvalues(p);
    if (eigs[0] <= 0) throw NotSchur("solve_discrete_lyapunov: P not positive definite");
    return p;
}

Vec symmetric_eigenvalues(const Mat& s) {
    const Eigen::Index n = s.rows();
    if (s.cols() != n) throw LengthMismatch("symmetric_eigenvalues: not square");
    Mat a = ((s + s.transpose()) / 2.0).eval();
    if (n == 1) return Vec::Constant(1, a(0, 0));

    auto off_norm = [&a, n]() {
        double sum = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) sum += 2 * a(i, j) * a(i, j);
        return std::sqrt(sum);
    };
    const double tol = 1e-12 * std::max(1.0, a.norm());

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_norm() <= tol) {
            Vec eigs = a.diagonal();
            std::sort(eigs.data(), eigs.data() + n);
            return eigs;
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                double t = std::copysign(1.0, theta) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1.0 / std::sqrt(t * t + 1);
                double sn = t * c;
                Eigen::JacobiRotation<double> rot(c, sn);
                a.applyOnTheLeft(p, q, rot.adjoint());
                a.applyOnTheRight(p, q, rot);
            }
        }
    }
    throw NoConvergence("symmetric_eigenvalues: Jacobi did not converge in 100 sweeps");
}

std::pair<double, double> eig_extremes_sym(const Mat& s) {
    Vec eigs = symmetric_eigenvalues(s);
    return {eigs[0], eigs[eigs.size() - 1]};
}

double spectral_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Mat gram = m.transpose() * m;
    auto [lo, hi] = eig_extremes_sym(gram);
    (void)lo;
    return std::sqrt(std::max(0.0, hi));
}

bool is_controllable(const Mat& a, const Mat& b) {
    const Eigen::Index n = a.rows();
    Mat ctrb(n, n * b.cols());
    Mat ab = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.block(0, k * b.cols(), n, b.cols()) = ab;
        ab = a * ab;
    }
    return ctrb.colPivHouseholderQr().rank() == n;
}

Mat place_poles(const Mat& a, const Mat& b, const Vec& poles) {
    const Eigen::Index n = a.rows();
    if (poles.size() != n) throw LengthMismatch("place_poles: need one pole per state");

    // Reduce multi-input to single input through a fixed direction, then
    // apply Ackermann's formula on the reduced column.
    Vec dir = Vec::Zero(b.cols());
    for (Eigen::Index i = 0; i < b.cols(); ++i) dir[i] = 1.0 / std::sqrt(2.0 + i);
    Vec col = b * dir;

    Mat ctrb(n, n);
    Vec ab = col;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.col(k) = ab;
        ab = a * ab;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(ctrb);
    if (qr.rank() < n) throw NotControllable("place_poles: reduced pair not controllable");

    // phi(A) for the desired characteristic polynomial.
    Mat phi = Mat::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) phi = (phi * (a - poles[i] * Mat::Identity(n, n))).eval();

    Vec en = Vec::Zero(n);
    en[n - 1] = 1.0;
    // Row selector e_n' C^{-1}: solve C' w = e_n, then the row is w'.
    Vec w = ctrb.transpose().colPivHouseholderQr().solve(en);
    Mat krow = w.transpose() * phi;  // 1 x n
    return dir * krow;               // n_u x n_x
}

}  // namespace ectl
