#pragma once

#include "bamg/kernels.hpp"

// Internal: the per-ISA tables defined by kernels_{scalar,avx2}.cpp.
namespace bamg::kernels {

extern const Ops kScalarOps;
#if defined(BAMG_BUILD_AVX2)
extern const Ops kAvx2Ops;
#endif

}  // namespace bamg::kernels
