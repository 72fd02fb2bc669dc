#pragma once

namespace rydeit {

/// Selects the OpenMP kernels or their serial reference implementations.
/// Both produce bit-identical results: reductions always run in index order.
enum class Execution { serial, parallel };

}  // namespace rydeit
