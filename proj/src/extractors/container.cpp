#include "pia/extractors/container.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "pia/errors.hpp"

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace pia::extractors {

namespace {

template <typename T>
void put(std::vector<char>& out, T value) {
  const auto* p = reinterpret_cast<const char*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<char>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    T value;
    take(&value, sizeof(T), what);
    return value;
  }

  void take(void* dst, std::size_t n, const char* what) {
    if (n > bytes_.size() - pos_) throw CacheError(std::string("truncated file while reading ") + what);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Blob& Container::blob(const std::string& name) const {
  for (const auto& b : blobs) {
    if (b.name == name) return b;
  }
  throw CacheError("missing blob '" + name + "'");
}

bool Container::has_blob(const std::string& name) const {
  for (const auto& b : blobs) {
    if (b.name == name) return true;
  }
  return false;
}

std::vector<char> serialize_container(const Container& container) {
  if (container.magic.size() != 4) throw CacheError("container magic must be four bytes");
  std::vector<char> out(container.magic.begin(), container.magic.end());
  put<std::uint32_t>(out, container.version);
  const std::string meta = container.metadata.dump();
  put<std::uint64_t>(out, meta.size());
  out.insert(out.end(), meta.begin(), meta.end());
  for (const auto& blob : container.blobs) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(blob.name.size()));
    out.insert(out.end(), blob.name.begin(), blob.name.end());
    const std::uint64_t bytes = blob.data.size() * sizeof(float);
    put<std::uint64_t>(out, bytes);
    const auto* p = reinterpret_cast<const char*>(blob.data.data());
    out.insert(out.end(), p, p + bytes);
  }
  return out;
}

void write_container(const std::string& path, const Container& container) {
  const auto bytes = serialize_container(container);
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CacheError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CacheError("write failed for " + path);
}

Container parse_container(const std::vector<char>& bytes, const std::string& expected_magic,
                          std::uint32_t expected_version) {
  Reader reader(bytes);
  Container c;
  c.magic.resize(4);
  reader.take(c.magic.data(), 4, "magic");
  if (c.magic != expected_magic) throw CacheError("bad magic '" + c.magic + "', expected '" + expected_magic + "'");
  c.version = reader.get<std::uint32_t>("version");
  if (c.version != expected_version) {
    throw CacheError("format version mismatch: file has version " + std::to_string(c.version) +
                     ", reader expects version " + std::to_string(expected_version));
  }
  const auto meta_len = reader.get<std::uint64_t>("metadata length");
  if (meta_len > bytes.size()) throw CacheError("truncated file while reading metadata");
  std::string meta(meta_len, '\0');
  reader.take(meta.data(), meta_len, "metadata");
  try {
    c.metadata = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw CacheError(std::string("corrupt metadata: ") + e.what());
  }
  while (!reader.done()) {
    Blob blob;
    const auto name_len = reader.get<std::uint32_t>("blob name length");
    if (name_len > bytes.size()) throw CacheError("truncated file while reading blob name");
    blob.name.resize(name_len);
    reader.take(blob.name.data(), name_len, "blob name");
    const auto byte_len = reader.get<std::uint64_t>("blob length");
    if (byte_len % sizeof(float) != 0) throw CacheError("blob '" + blob.name + "' length is not a float32 multiple");
    if (byte_len > bytes.size()) throw CacheError("truncated file while reading blob '" + blob.name + "'");
    blob.data.resize(byte_len / sizeof(float));
    reader.take(blob.data.data(), byte_len, "blob data");
    c.blobs.push_back(std::move(blob));
  }
  return c;
}

Container read_container(const std::string& path, const std::string& expected_magic, std::uint32_t expected_version) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw CacheError("cannot open " + path);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<char> bytes(size);
  in.read(bytes.data(), static_cast<std::streamsize>(size));
  if (!in) throw CacheError("read failed for " + path);
  return parse_container(bytes, expected_magic, expected_version);
}

}  // namespace pia::extractors
