#pragma once

#include <string>

#include "btensor/tensor.hpp"

namespace btensor::testing {

// Order 4, dim 2: satisfies the product inequality but is not positive definite.
inline Tensor counterexample_order4() {
    return make_tensor(4, 2, {{{1, 1, 1, 1}, 2.0},
                              {{2, 2, 2, 2}, 2.0},
                              {{1, 2, 2, 2}, -1.0},
                              {{2, 1, 2, 2}, -1.0},
                              {{2, 2, 1, 2}, -1.0},
                              {{2, 2, 2, 1}, -1.0}});
}

// Order 3, dim 2, not symmetric: quasi-double B but not double B.
inline Tensor remark_order3() {
    return make_tensor(3, 2, {{{1, 1, 1}, 2.0},
                              {{1, 2, 2}, -0.3},
                              {{2, 1, 1}, -1.0},
                              {{2, 1, 2}, -0.3},
                              {{2, 2, 1}, -1.5},
                              {{2, 2, 2}, 2.0}});
}

// 3I + 0.5 * all-one, order 4 dim 2.
inline Tensor diag_plus_half_ones() {
    return linear_combine(scaled(unit_tensor(4, 2), 3.0),
                          partially_all_one(4, 2, IndexSubset({1, 2}, 2)), 0.5);
}

inline std::string data_path(const std::string& name) {
    return std::string(BTENSOR_TEST_DATA_DIR) + "/" + name;
}

}  // namespace btensor::testing
