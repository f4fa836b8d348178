#include "gvss/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>
#include <sstream>

#include "gvss/error.hpp"

namespace gvss {

namespace {

[[noreturn]] void throw_errno(const std::string& what, int err) {
  const std::string msg = what + ": " + std::strerror(err);
  if (err == ENOSPC || err == EDQUOT) throw Error(ErrorCode::StorageFull, msg);
  throw Error(ErrorCode::IoError, msg);
}

void write_file_synced(const std::filesystem::path& path, const std::uint8_t* data,
                       std::size_t size) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw_errno("open " + path.string(), errno);
  std::size_t done = 0;
  while (done < size) {
    const ssize_t n = ::write(fd, data + done, size - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      ::unlink(path.c_str());
      throw_errno("write " + path.string(), err);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    ::unlink(path.c_str());
    throw_errno("fsync " + path.string(), err);
  }
  ::close(fd);
}

void rename_into_place(const std::filesystem::path& from, const std::filesystem::path& to) {
  if (::rename(from.c_str(), to.c_str()) != 0) {
    const int err = errno;
    ::unlink(from.c_str());
    throw_errno("rename " + from.string(), err);
  }
}

std::string sanitize_field(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; },
                  '_');
  return s;
}

const std::regex& snapshot_file_pattern() {
  static const std::regex re(R"(^(\d{13}-\d{6,})\.(jpg|png)$)");
  return re;
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | b[at + 3];
}

// Encoding recovered from file contents for snapshots missing from the index.
std::optional<Encoding> sniff_encoding(const std::vector<std::uint8_t>& b) {
  if (b.size() >= 2 && b[0] == 0xFF && b[1] == 0xD8) return Encoding::Jpeg;
  if (b.size() >= 26 && b[0] == 0x89 && b[1] == 'P' && b[2] == 'N' && b[3] == 'G') {
    switch (b[25]) {
      case 0: return Encoding::PngGray;
      case 2: return Encoding::Png24;
      case 3: return Encoding::Png8;
      default: return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::pair<int, int>> sniff_dimensions(const std::vector<std::uint8_t>& b) {
  if (b.size() >= 24 && b[0] == 0x89 && b[1] == 'P') {
    return std::make_pair(static_cast<int>(be32(b, 16)), static_cast<int>(be32(b, 20)));
  }
  if (b.size() < 4 || b[0] != 0xFF || b[1] != 0xD8) return std::nullopt;
  std::size_t i = 2;
  while (i + 9 < b.size()) {
    if (b[i] != 0xFF) return std::nullopt;
    const std::uint8_t marker = b[i + 1];
    const std::size_t len = (std::size_t{b[i + 2]} << 8) | b[i + 3];
    if (marker >= 0xC0 && marker <= 0xC2) {
      const int h = (b[i + 5] << 8) | b[i + 6];
      const int w = (b[i + 7] << 8) | b[i + 8];
      return std::make_pair(w, h);
    }
    i += 2 + len;
  }
  return std::nullopt;
}

SnapshotStore::SnapshotStore(std::filesystem::path dir, const Clock& clock)
    : dir_(std::move(dir)), clock_(clock) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw Error(ErrorCode::IoError, "snapshot_dir " + dir_.string() + " is not usable: " +
                                        (ec ? ec.message() : "not a directory"));
  }
  recover();
}

std::filesystem::path SnapshotStore::path_for(const SnapshotRecord& r) const {
  return dir_ / (r.snapshot_id + "." + file_extension(r.encoding));
}

void SnapshotStore::recover() {
  std::unique_lock lock(mu_);
  records_.clear();

  std::map<std::string, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(".tmp-", 0) == 0) {
      std::filesystem::remove(entry.path());  // interrupted save
      continue;
    }
    std::smatch m;
    if (entry.is_regular_file() && std::regex_match(name, m, snapshot_file_pattern())) {
      files[m[1].str()] = entry.path();
    }
  }

  std::ifstream idx(dir_ / kIndexFileName);
  std::string line;
  while (std::getline(idx, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (f.size() != 6) continue;
    SnapshotRecord r;
    r.snapshot_id = f[0];
    r.camera_id = f[1];
    try {
      r.captured_at = parse_iso8601(f[2]);
      r.byte_length = std::stoull(f[4]);
    } catch (const std::exception&) {
      continue;
    }
    const auto enc = parse_encoding(f[3]);
    if (!enc) continue;
    r.encoding = *enc;
    r.media_type = f[5];
    const auto it = files.find(r.snapshot_id);
    if (it == files.end() || it->second != path_for(r)) continue;
    std::error_code ec;
    if (std::filesystem::file_size(it->second, ec) != r.byte_length || ec) continue;
    files.erase(it);
    records_.push_back(std::move(r));
  }

  // Renamed into place but never indexed: adopt with what the file tells us.
  for (const auto& [id, path] : files) {
    const auto bytes = read_all(path);
    // The extension was chosen from the saved encoding; the header only
    // refines which PNG flavour it was.
    const std::string ext = path.extension().string().substr(1);
    auto enc = sniff_encoding(bytes);
    if (!enc || file_extension(*enc) != ext) enc = ext == "jpg" ? Encoding::Jpeg : Encoding::Png24;
    SnapshotRecord r;
    r.snapshot_id = id;
    r.captured_at = from_epoch_millis(std::stoll(id.substr(0, 13)));
    r.encoding = *enc;
    r.byte_length = bytes.size();
    r.media_type = media_type(*enc);
    records_.push_back(std::move(r));
  }

  std::sort(records_.begin(), records_.end(),
            [](const auto& a, const auto& b) { return a.snapshot_id < b.snapshot_id; });
  // Continue the counter so ids minted in the same millisecond as a previous
  // run still sort after it.
  std::uint64_t next = 0;
  for (const auto& r : records_) {
    next = std::max<std::uint64_t>(next, std::stoull(r.snapshot_id.substr(14)) + 1);
  }
  counter_ = next;
  write_index_locked();
}

void SnapshotStore::write_index_locked() const {
  std::string text;
  for (const auto& r : records_) {
    text += r.snapshot_id + '\t' + sanitize_field(r.camera_id) + '\t' +
            iso8601_millis(r.captured_at) + '\t' + to_string(r.encoding) + '\t' +
            std::to_string(r.byte_length) + '\t' + r.media_type + '\n';
  }
  const auto tmp = dir_ / ".tmp-index";
  write_file_synced(tmp, reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
  rename_into_place(tmp, dir_ / kIndexFileName);
}

std::string SnapshotStore::next_id(WallTime now) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%013lld-%06llu", static_cast<long long>(epoch_millis(now)),
                static_cast<unsigned long long>(counter_++));
  return buf;
}

SnapshotRecord SnapshotStore::save(const EncodedImage& image, const std::string& camera_id,
                                   WallTime captured_at) {
  if (image.bytes.empty()) throw Error(ErrorCode::IoError, "refusing to save an empty image");

  SnapshotRecord r;
  r.camera_id = sanitize_field(camera_id);
  r.captured_at = captured_at;
  r.encoding = image.encoding;
  r.byte_length = image.bytes.size();
  r.media_type = image.media_type;
  {
    std::shared_lock lock(mu_);
    do {
      r.snapshot_id = next_id(clock_.now());
    } while (std::any_of(records_.begin(), records_.end(),
                         [&](const auto& e) { return e.snapshot_id == r.snapshot_id; }));
  }

  const auto tmp = dir_ / (".tmp-" + r.snapshot_id);
  write_file_synced(tmp, image.bytes.data(), image.bytes.size());
  auto expected = FaultPoint::AfterTempWrite;
  if (fault_.compare_exchange_strong(expected, FaultPoint::None)) {
    throw Error(ErrorCode::IoError, "simulated crash after temp write");
  }

  std::unique_lock lock(mu_);
  rename_into_place(tmp, path_for(r));
  expected = FaultPoint::AfterRename;
  if (fault_.compare_exchange_strong(expected, FaultPoint::None)) {
    throw Error(ErrorCode::IoError, "simulated crash after rename");
  }
  records_.push_back(r);
  try {
    write_index_locked();
  } catch (...) {
    records_.pop_back();
    std::filesystem::remove(path_for(r));
    throw;
  }
  return r;
}

std::vector<SnapshotRecord> SnapshotStore::list() const {
  std::shared_lock lock(mu_);
  std::vector<SnapshotRecord> out(records_.rbegin(), records_.rend());
  return out;
}

std::optional<SnapshotRecord> SnapshotStore::find(const std::string& snapshot_id) const {
  std::shared_lock lock(mu_);
  for (const auto& r : records_) {
    if (r.snapshot_id == snapshot_id) return r;
  }
  return std::nullopt;
}

EncodedImage SnapshotStore::fetch(const std::string& snapshot_id) const {
  std::shared_lock lock(mu_);
  const auto it = std::find_if(records_.begin(), records_.end(),
                               [&](const auto& r) { return r.snapshot_id == snapshot_id; });
  if (it == records_.end()) throw Error(ErrorCode::NotFound, "no snapshot " + snapshot_id);
  EncodedImage img;
  img.bytes = read_all(path_for(*it));
  img.media_type = it->media_type;
  img.encoding = it->encoding;
  if (const auto dims = sniff_dimensions(img.bytes)) {
    img.width = dims->first;
    img.height = dims->second;
  }
  return img;
}

void SnapshotStore::remove(const std::string& snapshot_id) {
  std::unique_lock lock(mu_);
  const auto it = std::find_if(records_.begin(), records_.end(),
                               [&](const auto& r) { return r.snapshot_id == snapshot_id; });
  if (it == records_.end()) throw Error(ErrorCode::NotFound, "no snapshot " + snapshot_id);
  const SnapshotRecord removed = *it;
  records_.erase(it);
  try {
    write_index_locked();
  } catch (...) {
    records_.push_back(removed);
    std::sort(records_.begin(), records_.end(),
              [](const auto& a, const auto& b) { return a.snapshot_id < b.snapshot_id; });
    throw;
  }
  std::error_code ec;
  std::filesystem::remove(path_for(removed), ec);
}

}  // namespace gvss
