#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gvss/clock.hpp"
#include "gvss/pipeline.hpp"

namespace gvss {

struct SnapshotRecord {
  std::string snapshot_id;  // "<epoch-millis:13>-<counter:6>", sorts by time
  std::string camera_id;
  WallTime captured_at;
  Encoding encoding = Encoding::Jpeg;
  std::uint64_t byte_length = 0;
  std::string media_type;

  bool operator==(const SnapshotRecord&) const = default;
};

inline constexpr const char* kIndexFileName = "snapshots.idx";

// Width/height from a PNG IHDR or JPEG SOF header; nullopt if unrecognised.
std::optional<std::pair<int, int>> sniff_dimensions(const std::vector<std::uint8_t>& bytes);

// One file per snapshot, <snapshot_id>.<ext>, written to a temp name and
// renamed into place, plus a tab-separated index rebuilt by a recovery scan
// when the store is opened.
class SnapshotStore {
 public:
  // Where a simulated crash interrupts save().
  enum class FaultPoint { None, AfterTempWrite, AfterRename };

  SnapshotStore(std::filesystem::path dir, const Clock& clock);

  // Throws Error(IoError) or Error(StorageFull); the index is unchanged on
  // failure.
  SnapshotRecord save(const EncodedImage& image, const std::string& camera_id,
                      WallTime captured_at);
  // Newest first.
  std::vector<SnapshotRecord> list() const;
  // Throws Error(NotFound).
  EncodedImage fetch(const std::string& snapshot_id) const;
  std::optional<SnapshotRecord> find(const std::string& snapshot_id) const;
  // Throws Error(NotFound).
  void remove(const std::string& snapshot_id);

  const std::filesystem::path& dir() const { return dir_; }

  // Test seam: the next save() stops at this point as if the process died,
  // throwing Error(IoError) and leaving the on-disk state as it was.
  void inject_fault(FaultPoint point) { fault_ = point; }

 private:
  void recover();
  void write_index_locked() const;
  std::filesystem::path path_for(const SnapshotRecord& r) const;
  std::string next_id(WallTime now);

  std::filesystem::path dir_;
  const Clock& clock_;
  mutable std::shared_mutex mu_;
  std::vector<SnapshotRecord> records_;  // ascending by id
  std::atomic<std::uint64_t> counter_{0};
  std::atomic<FaultPoint> fault_{FaultPoint::None};
};

}  // namespace gvss
