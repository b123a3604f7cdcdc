// SPDX-License-Identifier: Apache-2.0
#include "rankarena/cache.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include "rankarena/error.hpp"

namespace rankarena {
namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path root) : root_(std::move(root)) {}

fs::path ResponseCache::entry_path(RequestKind kind, const CacheKey& key) const {
  return root_ / std::string(to_string(kind)) / key.digest;
}

std::optional<nlohmann::json> ResponseCache::load(RequestKind kind, const CacheKey& key) const {
  const auto path = entry_path(kind, key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto entry = nlohmann::json::parse(in);
    return entry.at("response");
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError("corrupt cache entry " + path.string() + ": " + e.what());
  }
}

void ResponseCache::store(RequestKind kind, const CacheKey& key, const nlohmann::json& request,
                          const nlohmann::json& response) {
  static std::atomic<unsigned long> counter{0};
  const auto path = entry_path(kind, key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error("cannot create cache directory " + path.parent_path().string());

  std::ostringstream suffix;
  suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
         << counter.fetch_add(1);
  auto tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + tmp.string());
    out << nlohmann::json{{"request", request}, {"response", response}}.dump(2) << '\n';
    if (!out) throw Error("short write on cache entry " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot publish cache entry " + path.string());
  }
}

std::size_t ResponseCache::entry_count(RequestKind kind) const {
  const auto dir = root_ / std::string(to_string(kind));
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return 0;
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename().string().find(".tmp.") == std::string::npos) {
      ++n;
    }
  }
  return n;
}

}  // namespace rankarena
