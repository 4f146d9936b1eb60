#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "coderec/error.hpp"

namespace coderec {

using ExampleId = std::uint64_t;

/// Dense N x d single-precision matrix with one external id per row.
class VectorStore {
 public:
  VectorStore() = default;

  VectorStore(std::size_t dimension, std::vector<float> matrix, std::vector<ExampleId> ids)
      : dimension_(dimension), matrix_(std::move(matrix)), ids_(std::move(ids)) {
    if (dimension_ == 0) throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
    if (matrix_.size() % dimension_ != 0) {
      throw Error(ErrorCode::kDimensionMismatch, "matrix size is not a multiple of the dimension");
    }
    if (ids_.size() != matrix_.size() / dimension_) {
      throw Error(ErrorCode::kIdCountMismatch, std::to_string(ids_.size()) + " ids for " +
                                                   std::to_string(matrix_.size() / dimension_) + " rows");
    }
    std::unordered_set<ExampleId> seen(ids_.begin(), ids_.end());
    if (seen.size() != ids_.size()) throw Error(ErrorCode::kInvalidArgument, "duplicate example ids");
    for (float x : matrix_) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite vector component");
    }
  }

  std::size_t count() const noexcept { return ids_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  std::span<const float> matrix() const noexcept { return matrix_; }
  std::span<const ExampleId> ids() const noexcept { return ids_; }

  std::span<const float> row(std::size_t i) const {
    if (i >= count()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "row " + std::to_string(i) + " of " + std::to_string(count()));
    }
    return {matrix_.data() + i * dimension_, dimension_};
  }

  ExampleId id(std::size_t i) const { return ids_.at(i); }

 private:
  std::size_t dimension_ = 1;
  std::vector<float> matrix_;
  std::vector<ExampleId> ids_;
};

inline std::span<const float> get_row(const VectorStore& store, std::size_t i) { return store.row(i); }

inline constexpr char kEvecMagic[4] = {'E', 'V', 'E', 'C'};
inline constexpr std::uint32_t kEvecVersion = 1;
inline constexpr std::size_t kEvecHeaderBytes = 16;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::filesystem::path evec_path(const std::filesystem::path& base) {
  return std::filesystem::path(base.string() + ".evec");
}

inline std::filesystem::path ids_path(const std::filesystem::path& base) {
  return std::filesystem::path(base.string() + ".ids");
}

/// Writes <base>.evec and <base>.ids. The .evec layout is little-endian:
/// "EVEC", u32 version (1), u32 count, u32 dimension, then count*dimension
/// float32 values in row-major order.
inline void write_store(const VectorStore& store, const std::filesystem::path& base) {
  std::string bytes;
  bytes.reserve(kEvecHeaderBytes + store.matrix().size() * 4);
  bytes.append(kEvecMagic, 4);
  detail::put_u32(bytes, kEvecVersion);
  detail::put_u32(bytes, static_cast<std::uint32_t>(store.count()));
  detail::put_u32(bytes, static_cast<std::uint32_t>(store.dimension()));
  for (float x : store.matrix()) detail::put_u32(bytes, std::bit_cast<std::uint32_t>(x));

  std::ofstream evec(evec_path(base), std::ios::binary | std::ios::trunc);
  if (!evec) throw Error(ErrorCode::kIoError, "cannot open " + evec_path(base).string() + " for writing");
  evec.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!evec) throw Error(ErrorCode::kIoError, "failed writing " + evec_path(base).string());

  std::ofstream ids(ids_path(base), std::ios::binary | std::ios::trunc);
  if (!ids) throw Error(ErrorCode::kIoError, "cannot open " + ids_path(base).string() + " for writing");
  for (ExampleId id : store.ids()) ids << id << '\n';
  if (!ids) throw Error(ErrorCode::kIoError, "failed writing " + ids_path(base).string());
}

inline VectorStore read_store(const std::filesystem::path& base) {
  auto path = evec_path(base);
  std::ifstream evec(path, std::ios::binary);
  if (!evec) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(evec)), std::istreambuf_iterator<char>());

  if (bytes.size() < 4 || std::memcmp(bytes.data(), kEvecMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, path.string() + " does not start with EVEC");
  }
  if (bytes.size() < kEvecHeaderBytes) throw Error(ErrorCode::kTruncatedPayload, path.string() + ": short header");
  std::uint32_t version = detail::get_u32(bytes.data() + 4);
  if (version != kEvecVersion) {
    throw Error(ErrorCode::kVersionUnsupported, path.string() + ": version " + std::to_string(version));
  }
  std::uint64_t count = detail::get_u32(bytes.data() + 8);
  std::uint64_t dim = detail::get_u32(bytes.data() + 12);
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, path.string() + ": zero dimension");
  std::uint64_t payload = bytes.size() - kEvecHeaderBytes;
  if (payload != count * dim * 4) {
    throw Error(ErrorCode::kTruncatedPayload, path.string() + ": payload " + std::to_string(payload) +
                                                  " bytes, expected " + std::to_string(count * dim * 4));
  }
  std::vector<float> matrix(count * dim);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    matrix[i] = std::bit_cast<float>(detail::get_u32(bytes.data() + kEvecHeaderBytes + 4 * i));
  }

  auto ipath = ids_path(base);
  std::ifstream ids_in(ipath);
  if (!ids_in) throw Error(ErrorCode::kIoError, "cannot open " + ipath.string());
  std::vector<ExampleId> ids;
  std::string line;
  while (std::getline(ids_in, line)) {
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      ids.push_back(std::stoull(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, ipath.string() + ": bad id line '" + line + "'");
    }
  }
  if (ids.size() != count) {
    throw Error(ErrorCode::kIdCountMismatch,
                ipath.string() + " has " + std::to_string(ids.size()) + " ids, store has " + std::to_string(count));
  }
  return VectorStore(static_cast<std::size_t>(dim), std::move(matrix), std::move(ids));
}

}  // namespace coderec
