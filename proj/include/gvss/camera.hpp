#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gvss/clock.hpp"
#include "gvss/frame.hpp"

namespace gvss {

enum class CameraKind { SyntheticPattern, FileSequence };

const char* to_string(CameraKind k);

inline constexpr int kNormalWidth = 320;
inline constexpr int kNormalHeight = 240;
inline constexpr std::chrono::milliseconds kDefaultCadence{1000};

struct CameraDescriptor {
  std::string camera_id;
  std::string name;
  CameraKind kind = CameraKind::SyntheticPattern;
  int native_width = 0;
  int native_height = 0;
};

struct CameraConfig {
  std::string id;
  std::string name;
  CameraKind kind = CameraKind::SyntheticPattern;
  std::chrono::milliseconds cadence = kDefaultCadence;
  int width = 640;  // synthetic only
  int height = 480;
  std::filesystem::path path;  // FileSequence directory
};

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual Frame produce(std::uint64_t sequence) = 0;
  virtual int native_width() const = 0;
  virtual int native_height() const = 0;
};

class SyntheticSource final : public FrameSource {
 public:
  SyntheticSource(int width, int height);
  Frame produce(std::uint64_t sequence) override;
  int native_width() const override { return width_; }
  int native_height() const override { return height_; }

 private:
  int width_;
  int height_;
};

// Cycles the PNG/PPM stills of a directory in lexicographic order, one per
// produce() call. Files that fail to decode are skipped at load time; throws
// Error(ConfigError) if none are usable.
class FileSequenceSource final : public FrameSource {
 public:
  explicit FileSequenceSource(const std::filesystem::path& dir);
  Frame produce(std::uint64_t sequence) override;
  int native_width() const override { return frames_.front().width(); }
  int native_height() const override { return frames_.front().height(); }
  std::size_t size() const { return frames_.size(); }

 private:
  std::vector<Frame> frames_;
  std::size_t cursor_ = 0;
};

// One capture thread per camera writes the latest-frame slot at a fixed
// cadence; readers take the shared pointer under a short lock.
class Camera {
 public:
  Camera(CameraDescriptor descriptor, std::unique_ptr<FrameSource> source,
         std::chrono::milliseconds cadence, const Clock& clock);
  ~Camera();

  Camera(const Camera&) = delete;
  Camera& operator=(const Camera&) = delete;

  void start();
  void stop();
  // Captures one frame synchronously; used by tests and by start().
  void capture_once();

  // Throws Error(NoFrameYet) before the first capture.
  std::shared_ptr<const Frame> latest() const;

  const CameraDescriptor& descriptor() const { return descriptor_; }
  std::chrono::milliseconds cadence() const { return cadence_; }

 private:
  CameraDescriptor descriptor_;
  std::unique_ptr<FrameSource> source_;
  std::chrono::milliseconds cadence_;
  const Clock& clock_;
  std::uint64_t next_sequence_ = 1;

  mutable std::mutex slot_mu_;
  std::shared_ptr<const Frame> slot_;
  std::jthread thread_;
};

std::unique_ptr<Camera> make_camera(const CameraConfig& config, const Clock& clock);

class CameraRegistry {
 public:
  // Throws Error(ConfigError) on a duplicate id.
  void add(std::unique_ptr<Camera> camera);

  void start_all();
  void stop_all();

  // Throws Error(UnknownCamera) / Error(NoFrameYet).
  std::shared_ptr<const Frame> capture_latest(const std::string& camera_id) const;
  const Camera& get(const std::string& camera_id) const;

  std::vector<CameraDescriptor> descriptors() const;
  bool empty() const { return order_.empty(); }
  const std::string& first_id() const { return order_.front(); }

 private:
  std::map<std::string, std::unique_ptr<Camera>> cameras_;
  std::vector<std::string> order_;
};

}  // namespace gvss
