#pragma once

namespace whcn {

// Execution policy for the data-parallel kernels. Every parallel kernel has a
// serial twin that computes each output element in the same order, so the two
// policies produce bitwise-identical results; tests assert this.
enum class Exec {
    Serial,
    Parallel,
};

}  // namespace whcn
