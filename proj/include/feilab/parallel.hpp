#pragma once
// Thread-count plumbing for the OpenMP kernels. Every parallel sweep and
// butterfly takes an explicit `jobs` count resolved through here, and all of
// them are written so the result is byte-identical no matter how many threads
// run them (disjoint writes in the transforms, order-independent reductions
// plus a final deterministic sort in the sweeps).

namespace feilab {

// Resolve a requested job count: a positive request wins; 0 means "default",
// which reads the FEI_LAB_JOBS environment variable and falls back to the
// available hardware threads (1 when built without OpenMP).
int resolve_jobs(int requested);

// True when the library was compiled with OpenMP support.
bool parallel_enabled();

} // namespace feilab
