#pragma once

namespace siopt {

// Outcome of the optimize-and-prune loop for one element group.
enum class PruneState { Keep, Short, Open };

} // namespace siopt
