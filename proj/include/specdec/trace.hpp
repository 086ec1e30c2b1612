#pragma once

#include <cstddef>

namespace specdec {

/// Shape of one verification call: committed context length, batch rows, and
/// speculated width. Consumed by the latency model.
struct CallTrace {
    std::size_t context_len = 0;
    std::size_t batch = 0;
    std::size_t width = 0;

    bool operator==(const CallTrace&) const = default;
};

} // namespace specdec
