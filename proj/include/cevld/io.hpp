#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cevld/paths.hpp"
#include "cevld/sde.hpp"

namespace cevld {

/// Format a double with 17 significant digits (round-trips exactly).
std::string format_full(double v);

/// CSV with header `t,value`, one row per grid node. `comments` are emitted
/// first as `# ...` lines (used by the CLI to embed the resolved config).
void write_path_csv(std::ostream& os, const GridPath& path,
                    const std::vector<std::string>& comments = {});
GridPath read_path_csv(std::istream& is);

/// CSV with header `t,hdot`, one row per interval left endpoint.
void write_control_csv(std::ostream& os, const ControlPath& h,
                       const std::vector<std::string>& comments = {});
ControlPath read_control_csv(std::istream& is);

/// CSV with header `path_id,t,value`.
void write_ensemble_csv(std::ostream& os, const PathEnsemble& e,
                        const std::vector<std::string>& comments = {});

/// Compact binary layout (documented in the README): the magic bytes
/// "CEVLDE1\n", then the header fields N, n_paths (uint64), T (double), seed
/// (uint64), followed by n_paths * (N + 1) path samples and n_paths log
/// weights, all little-endian 64-bit.
void write_ensemble_binary(std::ostream& os, const PathEnsemble& e);
PathEnsemble read_ensemble_binary(std::istream& is);

} // namespace cevld
