#pragma once

namespace strbf {

/// Selects the OpenMP kernels or their serial reference. Both produce
/// bit-identical results: parallel sections only fill per-item slots and
/// every reduction runs serially in index order.
enum class Exec { Serial, Parallel };

}  // namespace strbf
