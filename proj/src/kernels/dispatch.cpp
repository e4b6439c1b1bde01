#include <cstdlib>
#include <string_view>

#include "wateralign/kernels.hpp"

namespace wateralign::kernels {

namespace {

struct Table {
  Isa isa;
  cplx (*symmetric_form)(std::span<const double>, std::span<const cplx>);
  cplx (*hermitian_band_form)(std::span<const cplx>, std::span<const BandRange>,
                              std::span<const cplx>);
  void (*rotate)(std::span<cplx>, std::span<const cplx>);
};

bool cpu_has_avx2() {
#if defined(WATERALIGN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& table() {
  static const Table t = [] {
    const char* env = std::getenv("WATERALIGN_SIMD");
    const bool forced_scalar = env != nullptr && std::string_view(env) == "scalar";
#if defined(WATERALIGN_HAVE_AVX2)
    if (!forced_scalar && cpu_has_avx2()) {
      return Table{Isa::Avx2, &avx2::symmetric_form, &avx2::hermitian_band_form, &avx2::rotate};
    }
#else
    (void)forced_scalar;
#endif
    return Table{Isa::Scalar, &scalar::symmetric_form, &scalar::hermitian_band_form,
                 &scalar::rotate};
  }();
  return t;
}

}  // namespace

cplx symmetric_form(std::span<const double> matrix, std::span<const cplx> c) {
  return table().symmetric_form(matrix, c);
}

cplx hermitian_band_form(std::span<const cplx> matrix, std::span<const BandRange> bands,
                         std::span<const cplx> u) {
  return table().hermitian_band_form(matrix, bands, u);
}

void rotate(std::span<cplx> v, std::span<const cplx> phases) { table().rotate(v, phases); }

Isa active_isa() { return table().isa; }

bool isa_supported(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace wateralign::kernels
