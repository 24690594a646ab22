#include "svsp/content_store.hpp"

#include <fstream>

namespace svsp::app {

namespace fs = std::filesystem;

ContentStore::ContentStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::path canon = fs::weakly_canonical(root_, ec);
  if (ec || !fs::is_directory(canon)) {
    throw std::invalid_argument("content root is not a directory: " +
                                root_.string());
  }
  root_ = canon;
}

std::shared_ptr<const Bytes> ContentStore::get(const std::string& name) {
  if (name.empty() || fs::path(name).is_absolute()) return nullptr;

  std::lock_guard<std::mutex> lock(mutex_);
  auto hit = cache_.find(name);
  if (hit != cache_.end()) return hit->second;

  std::error_code ec;
  fs::path resolved = fs::weakly_canonical(root_ / name, ec);
  if (ec) return nullptr;
  // The canonical path must still sit inside the root ("../" and symlink
  // escapes both fail this).
  auto [root_end, ignored] =
      std::mismatch(root_.begin(), root_.end(), resolved.begin(),
                    resolved.end());
  if (root_end != root_.end()) return nullptr;
  if (!fs::is_regular_file(resolved, ec)) return nullptr;

  std::ifstream in(resolved, std::ios::binary);
  if (!in) return nullptr;
  auto data = std::make_shared<Bytes>();
  data->assign(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) return nullptr;
  cache_.emplace(name, data);
  return data;
}

}  // namespace svsp::app
