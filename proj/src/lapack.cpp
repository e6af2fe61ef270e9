#include "lapack.hpp"

#include <complex>
#include <vector>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace arraymem::lapack {

int general_eigen(Eigen::MatrixXcd a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    values.resize(n);
    vectors.resize(n, n);
    return LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, values.data(), nullptr, 1, vectors.data(), n);
}

int hermitian_top(Eigen::MatrixXcd a, int count, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    const lapack_int lo = n - count + 1;
    lapack_int found = 0;
    Eigen::VectorXd w(n);
    vectors.resize(n, count);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    const int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, lo, n, 0.0, &found,
                                    w.data(), vectors.data(), n, support.data());
    values = w.head(found);
    return info;
}

} // namespace arraymem::lapack
