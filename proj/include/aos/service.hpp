#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aos/io.hpp"

namespace aos::service {

struct Request {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::string if_none_match;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  std::optional<std::string> header(const std::string& name) const;
};

/// Bounded least-recently-used map from canonical keys to encoded bodies.
/// Thread safe; values are immutable once inserted.
class RenderCache {
 public:
  explicit RenderCache(std::size_t capacity) : capacity_(capacity) {}

  std::shared_ptr<const std::string> get(const std::string& key);
  void put(const std::string& key, std::shared_ptr<const std::string> value);

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  using Entry = std::pair<std::string, std::shared_ptr<const std::string>>;
  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::list<Entry> order_;  // front = most recent
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

struct LoadedEntry {
  std::string id;
  io::LoadedStack data;
  std::string fingerprint;  ///< hash of the sidecar and every frame file
};

/// Stack subdirectories (those holding poses.txt) of `data_dir`, keyed by
/// directory name. A missing directory throws IoError.
std::map<std::string, std::shared_ptr<const LoadedEntry>> load_stacks(const std::filesystem::path& data_dir);

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  std::string host = "127.0.0.1";
  int port = 8080;  ///< 0 picks a free port
  std::size_t cache_entries = 64;
  std::optional<std::filesystem::path> static_dir;  ///< viewer bundle mounted at /
};

/// Endpoints:
///   GET /healthz
///   GET /stacks
///   GET /stacks/{id}/meta
///   GET /stacks/{id}/integral?u&a&h
///   GET /stacks/{id}/stereo?u&a&ef&h&mode=sbs|anaglyph
///   GET /perception?ht&ef&vf&fov_f&ed&vd&fov_d&acuity&limit&separation
/// Images are PNG with an ETag derived from the canonical parameter key.
/// Errors are {"error": message, "constraint": optional}.
class ViewerService {
 public:
  ViewerService(std::map<std::string, std::shared_ptr<const LoadedEntry>> stacks, std::size_t cache_entries);

  Response handle(const Request& request) const;

  const RenderCache& cache() const noexcept { return *cache_; }

  /// Blocks serving HTTP until stop() is called. Calls `on_ready(port)` once
  /// the socket is bound. Returns false when the socket cannot be bound.
  bool serve(const std::string& host, int port, const std::optional<std::filesystem::path>& static_dir = {},
             const std::function<void(int)>& on_ready = {});
  void stop();

 private:
  Response stacks_listing() const;
  Response stack_meta(const LoadedEntry& entry) const;
  Response integral_image(const LoadedEntry& entry, const Request& request) const;
  Response stereo_image(const LoadedEntry& entry, const Request& request) const;
  Response perception(const Request& request) const;
  Response cached_png(const LoadedEntry& entry, const std::string& key, const Request& request,
                      const std::function<io::Bytes()>& render) const;

  std::map<std::string, std::shared_ptr<const LoadedEntry>> stacks_;
  std::unique_ptr<RenderCache> cache_;
  struct Server;
  std::shared_ptr<Server> server_;
  std::mutex server_mutex_;
};

}  // namespace aos::service
