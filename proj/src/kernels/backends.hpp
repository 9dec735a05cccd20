#pragma once

#include "psomle/kernels.hpp"

namespace psomle::kernels {

namespace scalar {
const KernelTable& kernel_table();
}

#if defined(PSOMLE_HAVE_AVX2)
namespace avx2 {
const KernelTable& kernel_table();
}
#endif

}  // namespace psomle::kernels
