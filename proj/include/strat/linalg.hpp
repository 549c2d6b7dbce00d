#pragma once

#include <Eigen/Dense>

namespace strat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Orthonormal basis of the column span (QR with deterministic sign fix:
// each basis column has positive leading pivot entry of R).
inline Mat orthonormalize(const Mat& a) {
    if (a.cols() == 0) return Mat(a.rows(), 0);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ() * Mat::Identity(a.rows(), a.cols());
    Mat r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    for (int j = 0; j < q.cols(); ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

// Numerical rank by relative singular value threshold.
inline int numerical_rank(const Eigen::JacobiSVD<Mat>& svd, double tol_rank) {
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    double top = s[0];
    if (top <= 1e-14) return 0;
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s[i] > tol_rank * top) ++rank;
    return rank;
}

inline double smallest_singular_value(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

inline double largest_singular_value(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

// Minimum-norm least squares solution via SVD with relative cutoff.
inline Vec svd_least_squares(const Mat& a, const Vec& b, double tol_rank) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    double top = s.size() ? s[0] : 0.0;
    Vec coeff = svd.matrixU().transpose() * b;
    for (int i = 0; i < s.size(); ++i) {
        if (top > 1e-300 && s[i] > tol_rank * top)
            coeff[i] /= s[i];
        else
            coeff[i] = 0.0;
    }
    return svd.matrixV() * coeff;
}

inline bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return a.size() < b.size();
}

}  // namespace strat
