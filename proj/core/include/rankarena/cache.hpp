// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "rankarena/providers.hpp"

namespace rankarena {

/// Content-addressed response store: one JSON file per request under
/// `<root>/<kind>/<digest>`, holding the canonical request and the response.
/// Writes go through a temporary file and a rename, so readers never observe
/// a partial entry.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path entry_path(RequestKind kind, const CacheKey& key) const;

  std::optional<nlohmann::json> load(RequestKind kind, const CacheKey& key) const;
  void store(RequestKind kind, const CacheKey& key, const nlohmann::json& request,
             const nlohmann::json& response);

  std::size_t entry_count(RequestKind kind) const;

 private:
  std::filesystem::path root_;
};

}  // namespace rankarena
