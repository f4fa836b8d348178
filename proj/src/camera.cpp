#include "gvss/camera.hpp"

#include <algorithm>
#include <condition_variable>

#include "gvss/codec.hpp"
#include "gvss/error.hpp"

namespace gvss {

const char* to_string(CameraKind k) {
  return k == CameraKind::SyntheticPattern ? "synthetic" : "files";
}

SyntheticSource::SyntheticSource(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::ConfigError, "synthetic camera dimensions must be >= 1");
  }
}

Frame SyntheticSource::produce(std::uint64_t sequence) {
  return synthetic_frame(width_, height_, sequence);
}

FileSequenceSource::FileSequenceSource(const std::filesystem::path& dir) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::ConfigError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      frames_.push_back(codec::load_image(f));
    } catch (const Error&) {
      // not an image we understand
    }
  }
  if (frames_.empty()) {
    throw Error(ErrorCode::ConfigError, "no PNG/PPM stills in " + dir.string());
  }
}

Frame FileSequenceSource::produce(std::uint64_t sequence) {
  Frame f = frames_[cursor_];
  cursor_ = (cursor_ + 1) % frames_.size();
  f.set_sequence(sequence);
  return f;
}

Camera::Camera(CameraDescriptor descriptor, std::unique_ptr<FrameSource> source,
               std::chrono::milliseconds cadence, const Clock& clock)
    : descriptor_(std::move(descriptor)),
      source_(std::move(source)),
      cadence_(cadence),
      clock_(clock) {
  if (cadence_ < std::chrono::milliseconds(1)) {
    throw Error(ErrorCode::ConfigError, "camera cadence must be >= 1 ms");
  }
  descriptor_.native_width = source_->native_width();
  descriptor_.native_height = source_->native_height();
}

Camera::~Camera() { stop(); }

void Camera::capture_once() {
  Frame f = source_->produce(next_sequence_);
  f.set_sequence(next_sequence_++);
  f.set_captured_at(clock_.now());
  auto shared = std::make_shared<const Frame>(std::move(f));
  std::lock_guard lock(slot_mu_);
  slot_ = std::move(shared);
}

void Camera::start() {
  if (thread_.joinable()) return;
  // first frame is taken synchronously so /frame works as soon as we return
  capture_once();
  thread_ = std::jthread([this](std::stop_token stop) {
    std::mutex m;
    std::condition_variable_any cv;
    auto next = std::chrono::steady_clock::now();
    for (;;) {
      next += cadence_;
      std::unique_lock lock(m);
      cv.wait_until(lock, stop, next, [] { return false; });
      if (stop.stop_requested()) break;
      capture_once();
    }
  });
}

void Camera::stop() {
  if (!thread_.joinable()) return;
  thread_.request_stop();
  thread_.join();
}

std::shared_ptr<const Frame> Camera::latest() const {
  std::lock_guard lock(slot_mu_);
  if (!slot_) throw Error(ErrorCode::NoFrameYet, "no frame captured yet on " + descriptor_.camera_id);
  return slot_;
}

std::unique_ptr<Camera> make_camera(const CameraConfig& config, const Clock& clock) {
  std::unique_ptr<FrameSource> source;
  if (config.kind == CameraKind::SyntheticPattern) {
    source = std::make_unique<SyntheticSource>(config.width, config.height);
  } else {
    source = std::make_unique<FileSequenceSource>(config.path);
  }
  CameraDescriptor d{config.id, config.name.empty() ? config.id : config.name, config.kind, 0, 0};
  return std::make_unique<Camera>(std::move(d), std::move(source), config.cadence, clock);
}

void CameraRegistry::add(std::unique_ptr<Camera> camera) {
  const std::string id = camera->descriptor().camera_id;
  if (cameras_.count(id)) throw Error(ErrorCode::ConfigError, "duplicate camera id " + id);
  order_.push_back(id);
  cameras_.emplace(id, std::move(camera));
}

void CameraRegistry::start_all() {
  for (auto& [id, cam] : cameras_) cam->start();
}

void CameraRegistry::stop_all() {
  for (auto& [id, cam] : cameras_) cam->stop();
}

const Camera& CameraRegistry::get(const std::string& camera_id) const {
  const auto it = cameras_.find(camera_id);
  if (it == cameras_.end()) throw Error(ErrorCode::UnknownCamera, "unknown camera " + camera_id);
  return *it->second;
}

std::shared_ptr<const Frame> CameraRegistry::capture_latest(const std::string& camera_id) const {
  return get(camera_id).latest();
}

std::vector<CameraDescriptor> CameraRegistry::descriptors() const {
  std::vector<CameraDescriptor> out;
  for (const auto& id : order_) out.push_back(cameras_.at(id)->descriptor());
  return out;
}

}  // namespace gvss
