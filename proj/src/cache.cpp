#include "hiw/cache.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "hiw/error.hpp"

namespace hiw {

std::string forms_cache_key(const SpaceParams& params, const SpaceOptions& options) {
  std::ostringstream os;
  os << "k=" << params.k << ";N=" << params.N << ";chi=" << params.character_index << ";M=";
  if (options.M > 0) os << options.M; else os << "auto";
  os << ";c_max=";
  if (options.c_max > 0) os << options.c_max; else os << "auto";
  if (options.candidates > 0) os << ";cand=" << options.candidates;
  if (options.rank_tol != SpaceOptions{}.rank_tol) os << ";tol=" << options.rank_tol;
  os << ";v=" << kFormsSchemaVersion;
  return os.str();
}

std::string forms_cache_hash(const std::string& key) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : key) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path forms_cache_path(const std::filesystem::path& dir, const SpaceParams& params,
                                       const SpaceOptions& options) {
  return dir / ("forms-" + forms_cache_hash(forms_cache_key(params, options)) + ".json");
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) fail(ErrorKind::InvalidArgument, "write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

FormsDocument load_or_build_forms(const SpaceParams& params, const SpaceOptions& options,
                                  const std::filesystem::path& dir, bool* hit) {
  const auto path = forms_cache_path(dir, params, options);
  const std::string key = forms_cache_key(params, options);
  if (std::ifstream in{path}) {
    try {
      const auto j = nlohmann::json::parse(in);
      if (j.value("cache_key", "") == key) {
        if (hit) *hit = true;
        return forms_from_json(j);
      }
    } catch (const nlohmann::json::exception&) {
      // unreadable entry: rebuild below
    }
  }
  if (hit) *hit = false;
  FormsDocument doc = build_forms(params, options);
  nlohmann::json j = to_json(doc);
  j["cache_key"] = key;
  write_atomic(path, dump(j));
  return doc;
}

}  // namespace hiw
