#pragma once

#include <Eigen/Core>

namespace blowup {

using Index = Eigen::Index;

// Dense field storage. All numerics are templated on the scalar type; the
// command-line tools and tests instantiate double.
template <class S>
using Vec = Eigen::Array<S, Eigen::Dynamic, 1>;

}  // namespace blowup
