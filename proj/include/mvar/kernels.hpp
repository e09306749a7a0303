#pragma once
// Data-parallel inner loops shared by the likelihood, EM and Monte Carlo code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active table is chosen once at first use from the
// running CPU; MVAR_ISA=scalar in the environment or set_isa() overrides it.
// Vector variants may differ from the scalar reference by reduction order
// only, so results agree to a few ulps of the accumulated magnitude.

#include <cstddef>
#include <span>
#include <string_view>

namespace mvar::kernels {

enum class Isa { scalar, avx2 };

/// Function table for one instruction set.
struct KernelTable {
    Isa isa;
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i w[i] * a[i] * b[i]
    double (*weighted_dot)(const double* w, const double* a, const double* b,
                           std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[t] = || L^{-1} r_t ||^2 for n residual vectors stored column-major
    // (resid[j * n + t] is coordinate j of residual t). L is the m x m lower
    // Cholesky factor stored column-major. scratch must hold 4 * m doubles.
    void (*mahalanobis_sq)(const double* chol_lower, std::size_t m,
                           const double* resid, std::size_t n, double* out,
                           double* scratch);
};

namespace scalar {
const KernelTable& table();
}

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
/// nullptr when the library was built without AVX2 support.
const KernelTable* table();
}
#endif

/// True when the running CPU and the build both provide the ISA.
bool isa_available(Isa isa);

/// The table currently used by the library.
const KernelTable& active();

/// Force a specific ISA. Returns false (and changes nothing) when unavailable.
bool set_isa(Isa isa);

std::string_view isa_name(Isa isa);

// Convenience wrappers over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
    return active().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), y.size());
}

}  // namespace mvar::kernels
