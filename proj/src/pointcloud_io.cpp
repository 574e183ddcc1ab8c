#include "avc/pointcloud_io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "avc/errors.hpp"

namespace avc {
namespace {

constexpr char kMagic[4] = {'P', 'C', 'L', 'D'};

std::string path_context(const std::filesystem::path& path) {
  return " (" + path.string() + ")";
}

void put_u32(std::array<unsigned char, 16>& buf, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf[at + i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint32_t get_u32(const std::array<unsigned char, 16>& buf, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[at + i]) << (8 * i);
  return v;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int default_intrinsic(int ambient, int intrinsic) {
  return intrinsic > 0 ? intrinsic : std::max(1, ambient - 1);
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw NumericalError("failed to format double");
  return std::string(buf.data(), ptr);
}

void write_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path,
                     bool header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing" + path_context(path));
  const int n = cloud.ambient_dim();
  if (header) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << 'x' << (j + 1);
    out << '\n';
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << format_double(p[j]);
    out << '\n';
  }
  if (!out) throw IoError("write failed" + path_context(path));
}

PointCloud read_cloud_csv(const std::filesystem::path& path, int intrinsic_dim,
                          double radius) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading" + path_context(path));
  std::vector<double> coords;
  int ambient = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_double(fields[j], row[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (ambient == 0 && coords.empty()) continue;  // header row
      throw IoError("non-numeric value on line " + std::to_string(line_no) +
                    path_context(path));
    }
    if (ambient == 0) ambient = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != ambient) {
      throw IoError("ragged row on line " + std::to_string(line_no) + path_context(path));
    }
    coords.insert(coords.end(), row.begin(), row.end());
  }
  if (ambient == 0) throw IoError("no points found" + path_context(path));
  return PointCloud(ambient, default_intrinsic(ambient, intrinsic_dim), radius, 0.0,
                    std::move(coords));
}

void write_cloud_binary(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing" + path_context(path));
  std::array<unsigned char, 16> header{};
  std::memcpy(header.data(), kMagic, 4);
  put_u32(header, 4, static_cast<std::uint32_t>(cloud.ambient_dim()));
  put_u32(header, 8, static_cast<std::uint32_t>(cloud.size()));
  put_u32(header, 12, 0);
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  for (double x : cloud.coords()) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
  if (!out) throw IoError("write failed" + path_context(path));
}

PointCloud read_cloud_binary(const std::filesystem::path& path, int intrinsic_dim,
                             double radius) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading" + path_context(path));
  std::array<unsigned char, 16> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != 16 || std::memcmp(header.data(), kMagic, 4) != 0) {
    throw IoError("not a PCLD file" + path_context(path));
  }
  const std::uint32_t ambient = get_u32(header, 4);
  const std::uint32_t count = get_u32(header, 8);
  if (ambient == 0) throw IoError("PCLD ambient dimension is zero" + path_context(path));
  std::vector<double> coords(static_cast<std::size_t>(ambient) * count);
  for (double& x : coords) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (in.gcount() != 8) throw IoError("truncated PCLD payload" + path_context(path));
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    std::memcpy(&x, &bits, sizeof x);
  }
  const int amb = static_cast<int>(ambient);
  return PointCloud(amb, default_intrinsic(amb, intrinsic_dim), radius, 0.0,
                    std::move(coords));
}

PointCloud read_cloud(const std::filesystem::path& path, int intrinsic_dim, double radius) {
  if (path.extension() == ".pcld") return read_cloud_binary(path, intrinsic_dim, radius);
  return read_cloud_csv(path, intrinsic_dim, radius);
}

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path, bool header) {
  if (path.extension() == ".pcld") {
    write_cloud_binary(cloud, path);
  } else {
    write_cloud_csv(cloud, path, header);
  }
}

void write_columns_csv(const std::filesystem::path& path,
                       std::span<const std::string> names,
                       std::span<const std::vector<double>> columns) {
  if (names.size() != columns.size()) throw DomainError("column name count mismatch");
  std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw DomainError("columns have different lengths");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing" + path_context(path));
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out << (j ? "," : "") << format_double(columns[j][i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed" + path_context(path));
}

}  // namespace avc
