// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/tensor_io.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "bitmm/errors.hpp"

namespace bitmm {

namespace {

constexpr char kMagic[4] = {'B', 'T', 'S', 'R'};
constexpr std::uint32_t kVersion = 1;

// Payload sanity cap: a dimension product beyond this cannot be a valid
// container on this side of the format and is treated as corruption.
constexpr std::uint64_t kMaxElems = std::uint64_t{1} << 40;

class Writer {
 public:
  explicit Writer(const std::string& path) : os_(path, std::ios::binary) {
    if (!os_) throw IoError("cannot open for writing: " + path);
    path_ = path;
  }

  void bytes(const void* p, std::size_t n) {
    os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!os_) throw IoError("write failed: " + path_);
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f32(float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    u32(u);
  }

 private:
  std::ofstream os_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : is_(path, std::ios::binary) {
    if (!is_) throw IoError("cannot open for reading: " + path);
    path_ = path;
  }

  void bytes(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (is_.gcount() != static_cast<std::streamsize>(n)) throw IoError("truncated file: " + path_);
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  float f32() {
    std::uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  bool at_eof() {
    is_.peek();
    return is_.eof();
  }

  const std::string& path() const { return path_; }

 private:
  std::ifstream is_;
  std::string path_;
};

void write_header(Writer& w, TensorKind kind, std::uint64_t rows, std::uint64_t cols) {
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u64(rows);
  w.u64(cols);
}

struct Header {
  TensorKind kind;
  std::uint64_t rows;
  std::uint64_t cols;
};

Header read_header(Reader& r) {
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad magic: " + r.path());
  std::uint32_t version = r.u32();
  if (version != kVersion)
    throw IoError("unsupported container version " + std::to_string(version) + ": " + r.path());
  std::uint8_t kind = r.u8();
  if (kind > 2) throw IoError("unknown tensor kind " + std::to_string(kind) + ": " + r.path());
  std::uint64_t rows = r.u64();
  std::uint64_t cols = r.u64();
  if (rows > kMaxElems || cols > kMaxElems || (rows != 0 && cols > kMaxElems / rows))
    throw IoError("dimension overflow: " + r.path());
  return {static_cast<TensorKind>(kind), rows, cols};
}

}  // namespace

void store_tensor(const std::string& path, const DenseMatrix& m) {
  Writer w(path);
  write_header(w, TensorKind::dense, static_cast<std::uint64_t>(m.rows()),
               static_cast<std::uint64_t>(m.cols()));
  for (float v : m.data()) w.f32(v);
}

void store_tensor(const std::string& path, const BitMatrix& m) {
  Writer w(path);
  write_header(w, TensorKind::bit, static_cast<std::uint64_t>(m.rows()),
               static_cast<std::uint64_t>(m.cols()));
  w.u64(m.words_per_row());
  for (std::uint64_t word : m.words()) w.u64(word);
}

void store_tensor(const std::string& path, const CsrMatrix& m) {
  m.validate();
  Writer w(path);
  write_header(w, TensorKind::csr, static_cast<std::uint64_t>(m.rows),
               static_cast<std::uint64_t>(m.cols));
  w.u64(m.nnz());
  for (std::uint64_t v : m.row_ptr) w.u64(v);
  for (std::uint64_t v : m.col_idx) w.u64(v);
  for (float v : m.vals) w.f32(v);
}

LoadedTensor load_tensor(const std::string& path) {
  Reader r(path);
  Header h = read_header(r);
  switch (h.kind) {
    case TensorKind::dense: {
      std::vector<float> data(h.rows * h.cols);
      for (float& v : data) v = r.f32();
      if (!r.at_eof()) throw IoError("trailing bytes: " + path);
      try {
        return DenseMatrix(static_cast<std::int64_t>(h.rows), static_cast<std::int64_t>(h.cols),
                           std::move(data));
      } catch (const std::invalid_argument& e) {
        throw IoError(std::string(e.what()) + ": " + path);
      }
    }
    case TensorKind::bit: {
      std::uint64_t wpr = r.u64();
      if (wpr > kMaxElems || (h.rows != 0 && wpr > kMaxElems / h.rows))
        throw IoError("dimension overflow: " + path);
      std::vector<std::uint64_t> words(h.rows * wpr);
      for (std::uint64_t& v : words) v = r.u64();
      if (!r.at_eof()) throw IoError("trailing bytes: " + path);
      try {
        return BitMatrix::from_words(static_cast<std::int64_t>(h.rows),
                                     static_cast<std::int64_t>(h.cols),
                                     static_cast<std::size_t>(wpr), std::move(words));
      } catch (const std::invalid_argument& e) {
        throw IoError(std::string(e.what()) + ": " + path);
      }
    }
    case TensorKind::csr: {
      std::uint64_t nnz = r.u64();
      if (nnz > kMaxElems) throw IoError("dimension overflow: " + path);
      std::vector<std::uint64_t> row_ptr(h.rows + 1);
      for (std::uint64_t& v : row_ptr) v = r.u64();
      std::vector<std::uint64_t> col_idx(nnz);
      for (std::uint64_t& v : col_idx) v = r.u64();
      std::vector<float> vals(nnz);
      for (float& v : vals) v = r.f32();
      if (!r.at_eof()) throw IoError("trailing bytes: " + path);
      try {
        return CsrMatrix::create(static_cast<std::int64_t>(h.rows),
                                 static_cast<std::int64_t>(h.cols), std::move(row_ptr),
                                 std::move(col_idx), std::move(vals));
      } catch (const std::invalid_argument& e) {
        throw IoError(std::string(e.what()) + ": " + path);
      }
    }
  }
  throw IoError("unknown tensor kind: " + path);
}

namespace {

template <typename T>
T load_kind(const std::string& path, const char* want) {
  LoadedTensor t = load_tensor(path);
  if (auto* p = std::get_if<T>(&t)) return std::move(*p);
  throw IoError(std::string("expected ") + want + " tensor: " + path);
}

}  // namespace

DenseMatrix load_dense(const std::string& path) { return load_kind<DenseMatrix>(path, "dense"); }
BitMatrix load_bit(const std::string& path) { return load_kind<BitMatrix>(path, "bit"); }
CsrMatrix load_csr(const std::string& path) { return load_kind<CsrMatrix>(path, "csr"); }

void store_thm_planes(const std::string& prefix, const ThmPlanes& p) {
  p.validate();
  store_tensor(prefix + ".t.btsr", p.t);
  store_tensor(prefix + ".h.btsr", p.h);
  store_tensor(prefix + ".m.btsr", p.m);
  nlohmann::json j;
  j["s"] = p.scale;
  if (p.gamma)
    j["gamma"] = *p.gamma;
  else
    j["gamma"] = nullptr;
  std::ofstream os(prefix + ".json");
  if (!os) throw IoError("cannot open for writing: " + prefix + ".json");
  os << j.dump(2) << "\n";
  if (!os) throw IoError("write failed: " + prefix + ".json");
}

ThmPlanes load_thm_planes(const std::string& prefix) {
  ThmPlanes p;
  p.t = load_bit(prefix + ".t.btsr");
  p.h = load_bit(prefix + ".h.btsr");
  p.m = load_bit(prefix + ".m.btsr");
  std::ifstream is(prefix + ".json");
  if (!is) throw IoError("cannot open for reading: " + prefix + ".json");
  nlohmann::json j;
  try {
    is >> j;
    p.scale = j.at("s").get<float>();
    if (!j.at("gamma").is_null()) p.gamma = j.at("gamma").get<float>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad sidecar: ") + e.what() + ": " + prefix + ".json");
  }
  try {
    p.validate();
  } catch (const InvalidEncoding& e) {
    throw IoError(std::string(e.what()) + ": " + prefix);
  }
  return p;
}

}  // namespace bitmm
