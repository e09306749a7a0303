#include <atomic>
#include <cstdlib>
#include <string>

#include "mvar/kernels.hpp"

namespace mvar::kernels {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
#if defined(MVAR_BUILD_AVX2)
const KernelTable* table_impl();
const KernelTable* table() { return table_impl(); }
#else
const KernelTable* table() { return nullptr; }
#endif
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* table_for(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return &scalar::table();
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (cpu_has_avx2()) return avx2::table();
#endif
            return nullptr;
    }
    return nullptr;
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("MVAR_ISA"); env && std::string(env) == "scalar")
        return &scalar::table();
    if (const KernelTable* t = table_for(Isa::avx2)) return t;
    return &scalar::table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> t{initial_table()};
    return t;
}

}  // namespace

bool isa_available(Isa isa) { return table_for(isa) != nullptr; }

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) {
    const KernelTable* t = table_for(isa);
    if (!t) return false;
    current().store(t, std::memory_order_relaxed);
    return true;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace mvar::kernels
