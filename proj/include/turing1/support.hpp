#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace turing1 {

// 64-bit FNV-1a content hash; used for run manifests and determinism checks.
std::uint64_t fnv1a64(const void* data, std::size_t len,
                      std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64_file(const std::string& path);  // throws on unreadable file
std::string to_hex(std::uint64_t v);

// Fixed "%.17g" rendering. Shortest-round-trip formatting differs across libc
// versions; pinning 17 significant digits keeps CSV output byte-stable.
std::string g17(double v);

// Worker cap: hardware_concurrency, clamped by $TURING_ONE_THREADS when set.
int worker_threads();

// Blocking parallel map over [0, n). Work items must be independent; callers
// write results by index so output ordering is deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace turing1
