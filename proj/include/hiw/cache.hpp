#pragma once

// On-disk cache of FormsDocument JSON, keyed by a hash of (k, N, character, M, c_max).

#include <filesystem>
#include <string>

#include "hiw/serialize.hpp"

namespace hiw {

/// Canonical key text, e.g. "k=6;N=1;chi=0;M=auto;c_max=auto;v=1".
std::string forms_cache_key(const SpaceParams& params, const SpaceOptions& options);
/// 64-bit FNV-1a of the key, as 16 hex digits.
std::string forms_cache_hash(const std::string& key);
std::filesystem::path forms_cache_path(const std::filesystem::path& dir, const SpaceParams& params,
                                       const SpaceOptions& options);

/// Write to a temporary file in the same directory, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Loads the cached document when present (and its key matches); otherwise builds and stores it.
FormsDocument load_or_build_forms(const SpaceParams& params, const SpaceOptions& options,
                                  const std::filesystem::path& dir, bool* hit = nullptr);

}  // namespace hiw
