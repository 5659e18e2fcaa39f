#include "nearnormal/random.hpp"

#include <cmath>
#include <numbers>

namespace nearnormal {

CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

CMatrix haar_unitary(Eigen::Index n, Rng& rng)
{
    const CMatrix g = complex_gaussian(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0)
            q.col(k) *= r(k, k) / mag;
    }
    return q;
}

Complex uniform_in_disc(Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double radius = std::sqrt(unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    return std::polar(radius, angle);
}

} // namespace nearnormal
