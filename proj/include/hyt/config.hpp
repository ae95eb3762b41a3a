#pragma once

// Precision selection. The numeric stack (kernels, tensors, model, training,
// evaluation) is compiled once per precision; each build lives in its own
// inline namespace so a float and a double library can be linked together.
//
//   HYT_REAL_DOUBLE  -> Real = double, namespace hyt::f64
//   (default)        -> Real = float,  namespace hyt::f32

#if defined(HYT_REAL_DOUBLE)
#define HYT_PREC f64
#else
#define HYT_PREC f32
#endif

namespace hyt {
inline namespace HYT_PREC {

#if defined(HYT_REAL_DOUBLE)
using Real = double;
#else
using Real = float;
#endif

}  // namespace HYT_PREC
}  // namespace hyt
