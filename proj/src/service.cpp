#include "aos/service.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include "aos/error.hpp"
#include "aos/perception.hpp"
#include "aos/render.hpp"

namespace aos::service {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Response json_response(int status, const json& body) {
  Response r;
  r.status = status;
  r.content_type = "application/json";
  r.body = body.dump();
  return r;
}

Response error_response(int status, const std::string& message, const std::string& constraint = {}) {
  json body = {{"error", message}};
  if (!constraint.empty()) body["constraint"] = constraint;
  return json_response(status, body);
}

double parse_number(const std::string& name, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw BadRequest("query parameter '" + name + "' must be a finite number, got '" + text + "'");
  }
  return v;
}

double number(const Request& req, const std::string& name, double fallback) {
  const auto it = req.query.find(name);
  return it == req.query.end() ? fallback : parse_number(name, it->second);
}

std::vector<double> number_list(const Request& req, const std::string& name, std::vector<double> fallback) {
  const auto it = req.query.find(name);
  if (it == req.query.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(name, item));
  if (out.empty()) throw BadRequest("query parameter '" + name + "' is empty");
  return out;
}

std::string fingerprint(const fs::path& dir, const std::vector<io::PoseRecord>& poses) {
  std::string blob = io::format_poses(poses);
  for (const auto& p : poses) {
    const io::Bytes b = io::read_file(dir / io::frame_file_name(p.index));
    blob.append(b.begin(), b.end());
  }
  return render::etag(blob);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::optional<std::string> Response::header(const std::string& name) const {
  for (const auto& [k, v] : headers) {
    if (k == name) return v;
  }
  return std::nullopt;
}

std::shared_ptr<const std::string> RenderCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(key);
  if (it == index_.end()) {
    ++misses_;
    return nullptr;
  }
  ++hits_;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->second;
}

void RenderCache::put(const std::string& key, std::shared_ptr<const std::string> value) {
  if (capacity_ == 0) return;
  std::lock_guard lock(mutex_);
  if (const auto it = index_.find(key); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return;  // first writer wins; values for one key are identical anyway
  }
  order_.emplace_front(key, std::move(value));
  index_[key] = order_.begin();
  while (order_.size() > capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
}

std::size_t RenderCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::size_t RenderCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t RenderCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::map<std::string, std::shared_ptr<const LoadedEntry>> load_stacks(const fs::path& data_dir) {
  if (!fs::is_directory(data_dir)) throw IoError("data directory does not exist: " + data_dir.string());
  std::map<std::string, std::shared_ptr<const LoadedEntry>> stacks;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    if (!entry.is_directory() || !fs::is_regular_file(entry.path() / io::kPosesFile)) continue;
    auto loaded = std::make_shared<LoadedEntry>(LoadedEntry{
        entry.path().filename().string(), io::read_stack(entry.path()), std::string()});
    loaded->fingerprint = fingerprint(entry.path(), loaded->data.poses);
    stacks.emplace(loaded->id, std::move(loaded));
  }
  return stacks;
}

ViewerService::ViewerService(std::map<std::string, std::shared_ptr<const LoadedEntry>> stacks,
                             std::size_t cache_entries)
    : stacks_(std::move(stacks)), cache_(std::make_unique<RenderCache>(cache_entries)) {}

Response ViewerService::handle(const Request& request) const {
  try {
    if (request.method != "GET" && request.method != "HEAD") {
      return error_response(405, "method " + request.method + " is not allowed");
    }
    const std::string& path = request.path;
    if (path == "/healthz") return json_response(200, {{"status", "ok"}, {"stacks", stacks_.size()}});
    if (path == "/stacks" || path == "/stacks/") return stacks_listing();
    if (path == "/perception") return perception(request);

    const std::string prefix = "/stacks/";
    if (path.rfind(prefix, 0) == 0) {
      const std::string rest = path.substr(prefix.size());
      const auto slash = rest.find('/');
      const std::string id = rest.substr(0, slash);
      const std::string action = slash == std::string::npos ? "" : rest.substr(slash + 1);
      const auto it = stacks_.find(id);
      if (it == stacks_.end()) throw NotFound("unknown stack '" + id + "'");
      if (action == "meta") return stack_meta(*it->second);
      if (action == "integral") return integral_image(*it->second, request);
      if (action == "stereo") return stereo_image(*it->second, request);
    }
    throw NotFound("no endpoint at " + path);
  } catch (const NotFound& e) {
    return error_response(404, e.what());
  } catch (const BadRequest& e) {
    return error_response(400, e.what());
  } catch (const ValidationError& e) {
    return error_response(422, e.what(), e.constraint());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

Response ViewerService::stacks_listing() const {
  json list = json::array();
  for (const auto& [id, entry] : stacks_) {
    list.push_back({{"id", id}, {"frame_count", entry->data.stack.size()}});
  }
  return json_response(200, list);
}

Response ViewerService::stack_meta(const LoadedEntry& entry) const {
  const ScanStack& s = entry.data.stack;
  const CameraIntrinsics& in = s.intrinsics();
  json poses = json::array();
  for (const io::PoseRecord& p : entry.data.poses) {
    poses.push_back({{"index", p.index}, {"x", p.x}, {"y", p.y}, {"z", p.z}});
  }
  json meta = {
      {"id", entry.id},
      {"frame_count", s.size()},
      {"path", {{"x_min", s.x_min()}, {"x_max", s.x_max()}, {"length", s.path_length()},
                {"center", s.path_center()}, {"spacing", s.spacing()}, {"y", s.y()}}},
      {"h", s.altitude()},
      {"intrinsics", {{"fov_deg", in.fov_deg}, {"width", in.width}, {"height", in.height},
                      {"focal_px", in.focal_px()}}},
      {"poses", poses},
      {"ground_truth", entry.data.ground_truth.has_value()},
  };
  return json_response(200, meta);
}

Response ViewerService::cached_png(const LoadedEntry& entry, const std::string& key, const Request& request,
                                   const std::function<io::Bytes()>& render) const {
  const std::string full_key = entry.id + "/" + key;
  const std::string tag = render::etag(entry.fingerprint + "|" + key);
  Response r;
  r.content_type = "image/png";
  r.headers = {{"ETag", tag}, {"Cache-Control", "public, max-age=3600"}, {"X-Render-Key", key}};
  if (!request.if_none_match.empty() && request.if_none_match == tag) {
    r.status = 304;
    return r;
  }
  auto body = cache_->get(full_key);
  if (!body) {
    const io::Bytes bytes = render();
    body = std::make_shared<const std::string>(bytes.begin(), bytes.end());
    cache_->put(full_key, body);
  }
  r.body = *body;
  return r;
}

Response ViewerService::integral_image(const LoadedEntry& entry, const Request& request) const {
  const ScanStack& stack = entry.data.stack;
  const render::IntegralRequest d = render::default_integral(stack);
  const render::IntegralRequest req =
      render::IntegralRequest{number(request, "u", d.u), number(request, "a", d.a), number(request, "h", d.h)}
          .canonical();
  render::check_viewpoint(stack, req.u);
  return cached_png(entry, req.key(), request, [&] { return render::integral_png(stack, req); });
}

Response ViewerService::stereo_image(const LoadedEntry& entry, const Request& request) const {
  const ScanStack& stack = entry.data.stack;
  const render::StereoRequest d = render::default_stereo(stack);
  render::StereoRequest req{number(request, "u", d.u), number(request, "a", d.a), number(request, "ef", d.ef),
                            number(request, "h", d.h), d.mode};
  if (const auto it = request.query.find("mode"); it != request.query.end()) {
    const auto mode = render::parse_display_mode(it->second);
    if (!mode) throw BadRequest("mode must be 'sbs' or 'anaglyph', got '" + it->second + "'");
    req.mode = *mode;
  }
  req = req.canonical();
  render::check_viewpoint(stack, req.u);
  integral::check_stereo_feasible(stack, req.u, req.ef, req.a);
  return cached_png(entry, req.key(), request, [&] { return render::stereo_png(stack, req); });
}

Response ViewerService::perception(const Request& request) const {
  perception::CaptureGeometry cap;
  perception::DisplayModel disp;
  perception::ObserverModel obs;
  cap.focal_distance = number(request, "vf", cap.focal_distance);
  cap.baseline = number(request, "ef", cap.baseline);
  cap.fov_deg = number(request, "fov_f", cap.fov_deg);
  disp.eye_separation = number(request, "ed", disp.eye_separation);
  disp.image_distance = number(request, "vd", disp.image_distance);
  disp.fov_deg = number(request, "fov_d", disp.fov_deg);
  obs.acuity_arcmin = number(request, "acuity", obs.acuity_arcmin);
  obs.gradient_limit = number(request, "limit", obs.gradient_limit);
  obs.separation_arcmin = number(request, "separation", obs.separation_arcmin);
  const std::vector<double> heights = number_list(request, "ht", {0.3, 1.8, 21.0});

  json results = json::array();
  double jddi_m = 0.0;
  for (double ht : heights) {
    const perception::PerceptionResult r = perception::evaluate(cap, disp, obs, ht);
    jddi_m = r.jddi_m;
    results.push_back({
        {"target_h", r.target_height},
        {"e_f", r.baseline},
        {"capture_disparity_m", r.capture_disparity_m},
        {"display_disparity_m", r.display_disparity_m},
        {"display_disparity_arcmin", r.display_disparity_arcmin},
        {"gradient", r.gradient},
        {"perceived_distance_m", optional_number(r.perceived_distance_m)},
        {"pth_m", optional_number(r.pth_m)},
        {"jddi_m", r.jddi_m},
        {"beyond_infinity", r.beyond_infinity},
        {"depth_detectable", r.depth_detectable},
        {"fusible", r.fusible},
        {"nonfusible", !r.fusible},
    });
  }
  json body = {
      {"capture", {{"vf", cap.focal_distance}, {"ef", cap.baseline}, {"fov_f", cap.fov_deg}}},
      {"display", {{"ed", disp.eye_separation}, {"vd", disp.image_distance}, {"fov_d", disp.fov_deg},
                   {"scale", perception::display_scale(cap, disp)}}},
      {"observer", {{"acuity", obs.acuity_arcmin}, {"limit", obs.gradient_limit},
                    {"separation", obs.separation_arcmin}}},
      {"jddi_m", jddi_m},
      {"results", results},
  };
  return json_response(200, body);
}

struct ViewerService::Server {
  httplib::Server http;
  bool stop_requested = false;
};

bool ViewerService::serve(const std::string& host, int port, const std::optional<fs::path>& static_dir,
                          const std::function<void(int)>& on_ready) {
  auto server = std::make_shared<Server>();
  {
    std::lock_guard lock(server_mutex_);
    server_ = server;
  }
  httplib::Server& http = server->http;
  if (static_dir && !http.set_mount_point("/", static_dir->string())) {
    throw IoError("static directory does not exist: " + static_dir->string());
  }
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  const auto dispatch = [this](const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query[k] = v;
    req.if_none_match = in.get_header_value("If-None-Match");
    const Response r = handle(req);
    out.status = r.status;
    for (const auto& [k, v] : r.headers) out.set_header(k, v);
    if (r.status != 304) out.set_content(r.body, r.content_type);
  };
  for (const char* route : {"/healthz", "/stacks", R"(/stacks/.*)", "/perception"}) http.Get(route, dispatch);

  const int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) return false;
  {
    std::lock_guard lock(server_mutex_);
    if (server->stop_requested) return true;
  }
  if (on_ready) on_ready(bound);
  const bool ok = http.listen_after_bind();
  std::lock_guard lock(server_mutex_);
  server_.reset();
  return ok || server->stop_requested;
}

void ViewerService::stop() {
  std::lock_guard lock(server_mutex_);
  if (!server_) return;
  server_->stop_requested = true;
  server_->http.stop();
}

}  // namespace aos::service
