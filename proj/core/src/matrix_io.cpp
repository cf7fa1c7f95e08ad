#include "sica/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sica/errors.hpp"

namespace sica {

namespace {

constexpr std::size_t kMaxHeaderLength = 64;

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0x00000000000000FFULL) << 56) | ((v & 0x000000000000FF00ULL) << 40) |
        ((v & 0x0000000000FF0000ULL) << 24) | ((v & 0x00000000FF000000ULL) << 8) |
        ((v & 0x000000FF00000000ULL) >> 8) | ((v & 0x0000FF0000000000ULL) >> 24) |
        ((v & 0x00FF000000000000ULL) >> 40) | ((v & 0xFF00000000000000ULL) >> 56);
  }
  return v;
}

FormatError io_error(const std::filesystem::path& path, const std::string& what) {
  return FormatError(FormatError::Kind::io, what + ": " + path.string());
}

}  // namespace

void write_matrix(const Matrix& m, const std::filesystem::path& path) {
  if (!m.allFinite()) {
    throw FormatError(FormatError::Kind::non_finite,
                      "refusing to write non-finite matrix to " + path.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path, "cannot open for writing");

  out << kMatrixMagic << ' ' << m.rows() << ' ' << m.cols() << '\n';
  std::vector<std::uint64_t> payload(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    payload[static_cast<std::size_t>(i)] = to_little_endian(std::bit_cast<std::uint64_t>(m.data()[i]));
  }
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(std::uint64_t)));
  if (!out) throw io_error(path, "write failed");
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");

  std::string header;
  char c = 0;
  while (header.size() < kMaxHeaderLength && in.get(c) && c != '\n') header.push_back(c);
  if (c != '\n') {
    throw FormatError(FormatError::Kind::bad_magic, "missing SICA header line in " + path.string());
  }

  std::istringstream fields(header);
  std::string magic;
  long long rows = -1, cols = -1;
  fields >> magic;
  if (magic != kMatrixMagic) {
    const bool versioned = magic.size() > 4 && magic.compare(0, 4, "SICA") == 0 &&
                           std::all_of(magic.begin() + 4, magic.end(),
                                       [](unsigned char ch) { return std::isdigit(ch) != 0; });
    if (versioned) {
      throw FormatError(FormatError::Kind::unsupported_version,
                        "unsupported format version '" + magic + "' in " + path.string());
    }
    throw FormatError(FormatError::Kind::bad_magic, "bad magic '" + magic + "' in " + path.string());
  }
  std::string trailing;
  if (!(fields >> rows >> cols) || rows < 0 || cols < 0 || (fields >> trailing)) {
    throw FormatError(FormatError::Kind::bad_magic, "malformed SICA1 header in " + path.string());
  }

  const auto expected = static_cast<std::uintmax_t>(rows) * static_cast<std::uintmax_t>(cols) * 8U;
  const auto offset = static_cast<std::uintmax_t>(in.tellg());
  std::error_code ec;
  const std::uintmax_t file_size = std::filesystem::file_size(path, ec);
  if (ec) throw io_error(path, "cannot stat");
  const std::uintmax_t available = file_size - offset;
  if (available < expected) {
    throw FormatError(FormatError::Kind::truncated,
                      "truncated payload in " + path.string() + ": expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(available));
  }
  if (available > expected) {
    throw FormatError(FormatError::Kind::dimension_mismatch,
                      "payload of " + std::to_string(available) + " bytes does not match declared " +
                          std::to_string(rows) + "x" + std::to_string(cols) + " in " + path.string());
  }

  std::vector<std::uint64_t> payload(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(expected));
  if (!in) throw io_error(path, "read failed");

  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = std::bit_cast<double>(to_little_endian(payload[static_cast<std::size_t>(i)]));
  }
  if (!m.allFinite()) {
    throw FormatError(FormatError::Kind::non_finite, "non-finite value in " + path.string());
  }
  return m;
}

void write_mask(const Mask& mask, const std::filesystem::path& path) {
  write_matrix(mask.cast<double>(), path);
}

Mask read_mask(const std::filesystem::path& path) {
  const Matrix m = read_matrix(path);
  if (((m.array() != 0.0) && (m.array() != 1.0)).any()) {
    throw FormatError(FormatError::Kind::dimension_mismatch,
                      "mask file holds values other than 0 and 1: " + path.string());
  }
  return m.array() != 0.0;
}

std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path) {
  return std::filesystem::path(matrix_path.string() + ".json");
}

void write_sidecar(const std::filesystem::path& matrix_path, const MatrixSidecar& sidecar) {
  nlohmann::json j;
  j["seed"] = sidecar.seed;
  j["created_by"] = sidecar.created_by;
  if (sidecar.grid) j["grid"] = {sidecar.grid->height, sidecar.grid->width};
  const auto path = sidecar_path(matrix_path);
  std::ofstream out(path);
  if (!out) throw io_error(path, "cannot open for writing");
  out << j.dump(2) << '\n';
}

std::optional<MatrixSidecar> read_sidecar(const std::filesystem::path& matrix_path) {
  const auto path = sidecar_path(matrix_path);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatError::Kind::bad_magic, "malformed sidecar " + path.string() + ": " + e.what());
  }
  MatrixSidecar sidecar;
  sidecar.seed = j.value("seed", Seed{0});
  sidecar.created_by = j.value("created_by", std::string{});
  if (j.contains("grid") && j["grid"].is_array() && j["grid"].size() == 2) {
    sidecar.grid = Grid{j["grid"][0].get<std::size_t>(), j["grid"][1].get<std::size_t>()};
  }
  return sidecar;
}

}  // namespace sica
