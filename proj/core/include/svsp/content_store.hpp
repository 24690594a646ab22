#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "svsp/engine.hpp"

namespace svsp::app {

// Lazily loads and caches files under one root.  Names are paths relative
// to the root; anything resolving outside it is refused.
class ContentStore {
 public:
  // Throws std::invalid_argument unless root is an existing directory.
  explicit ContentStore(std::filesystem::path root);

  // nullptr for unknown names, path escapes, or unreadable files.
  std::shared_ptr<const Bytes> get(const std::string& name);

  net::ContentResolver resolver() {
    return [this](const std::string& name) { return get(name); };
  }

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Bytes>> cache_;
};

}  // namespace svsp::app
