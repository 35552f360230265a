#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace dualtier {

/// Little-endian binary writer backed by an in-memory buffer. Buffering keeps
/// file writes atomic: the whole blob lands via write-temp-then-rename.
class BlobWriter {
 public:
  void magic(const char tag[5]) { raw(tag, 4); }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw_le(v); }
  void u64(std::uint64_t v) { raw_le(v); }
  void i32(std::int32_t v) { raw_le(static_cast<std::uint32_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    raw_le(bits);
  }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void f64_vec(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void i32_vec(const std::vector<int>& v) {
    u64(v.size());
    for (int x : v) i32(x);
  }
  void str_vec(const std::vector<std::string>& v) {
    u64(v.size());
    for (const auto& s : v) str(s);
  }

  const std::vector<char>& buffer() const { return buf_; }

 private:
  template <typename T>
  void raw_le(T v) {
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    raw(bytes, sizeof(T));
  }
  void raw(const void* data, std::size_t n) {
    const char* p = static_cast<const char*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }

  std::vector<char> buf_;
};

class BlobReader {
 public:
  explicit BlobReader(std::vector<char> data) : buf_(std::move(data)) {}

  void magic(const char tag[5]) {
    char got[5] = {};
    raw(got, 4);
    if (std::memcmp(got, tag, 4) != 0) {
      throw DataError(std::string("bad magic: expected '") + tag + "', got '" +
                      got + "'");
    }
  }
  std::uint8_t u8() {
    std::uint8_t v;
    raw(&v, 1);
    return v;
  }
  std::uint32_t u32() { return raw_le<std::uint32_t>(); }
  std::uint64_t u64() { return raw_le<std::uint64_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(raw_le<std::uint32_t>()); }
  double f64() {
    const std::uint64_t bits = raw_le<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    check(n);
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  std::vector<double> f64_vec() {
    const std::uint64_t n = u64();
    check(n * 8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::vector<int> i32_vec() {
    const std::uint64_t n = u64();
    check(n * 4);
    std::vector<int> v(n);
    for (auto& x : v) x = i32();
    return v;
  }
  std::vector<std::string> str_vec() {
    const std::uint64_t n = u64();
    check(n);
    std::vector<std::string> v(n);
    for (auto& s : v) s = str();
    return v;
  }
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  template <typename T>
  T raw_le() {
    char bytes[sizeof(T)];
    raw(bytes, sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(bytes[i])) << (8 * i);
    }
    return v;
  }
  void raw(void* out, std::size_t n) {
    check(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  void check(std::uint64_t n) const {
    if (pos_ + n > buf_.size()) throw DataError("blob truncated");
  }

  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

/// Write bytes via a temp file in the same directory, then rename.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::vector<char>& bytes) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& text) {
  atomic_write_file(path, std::vector<char>(text.begin(), text.end()));
}

inline std::vector<char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace dualtier
