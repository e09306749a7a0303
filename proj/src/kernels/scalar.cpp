#include "mvar/kernels.hpp"

namespace mvar::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mahalanobis_sq(const double* L, std::size_t m, const double* resid, std::size_t n,
                    double* out, double* scratch) {
    double* z = scratch;
    for (std::size_t t = 0; t < n; ++t) {
        double q = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double v = resid[i * n + t];
            for (std::size_t j = 0; j < i; ++j) v -= L[j * m + i] * z[j];
            z[i] = v / L[i * m + i];
            q += z[i] * z[i];
        }
        out[t] = q;
    }
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{Isa::scalar, &dot, &weighted_dot, &axpy, &mahalanobis_sq};
    return t;
}

}  // namespace mvar::kernels::scalar
