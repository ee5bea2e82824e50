#pragma once

// Extended-precision scalar usable with the templated Eigen routines.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace densfx {

/// IEEE quad layout (113-bit significand), software emulated. Expression templates
/// are off so Eigen sees a plain value type.
using quad = boost::multiprecision::number<boost::multiprecision::cpp_bin_float_quad::backend_type,
                                           boost::multiprecision::et_off>;

}  // namespace densfx
