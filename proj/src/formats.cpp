#include "exctop/formats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "exctop/errors.hpp"

namespace exctop {
namespace {

void write_binary(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

/// Cursor over a loaded PBM file that can report byte offsets in errors.
struct ByteCursor {
  const std::string& data;
  std::size_t pos = 0;
  const std::string& path;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path + ": " + what + " at byte " + std::to_string(pos));
  }

  bool eof() const { return pos >= data.size(); }
  char peek() const { return data[pos]; }

  void skip_ws_and_comments() {
    while (!eof()) {
      const char c = data[pos];
      if (c == '#') {
        while (!eof() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  int parse_nat(const char* what) {
    skip_ws_and_comments();
    if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
      fail(std::string("expected ") + what);
    long long value = 0;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
      value = value * 10 + (data[pos] - '0');
      if (value > 1'000'000'000LL) fail(std::string(what) + " out of range");
      ++pos;
    }
    return static_cast<int>(value);
  }
};

}  // namespace

void write_pbm(const std::string& path, const BinaryImage& img, bool binary) {
  const int nx = img.dims.nx, ny = img.dims.ny;
  std::string bytes;
  if (binary) {
    bytes = "P4\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n";
    const int row_bytes = (nx + 7) / 8;
    std::string row(static_cast<std::size_t>(row_bytes), '\0');
    for (int file_row = 0; file_row < ny; ++file_row) {
      const int iy = ny - 1 - file_row;
      std::fill(row.begin(), row.end(), '\0');
      for (int ix = 0; ix < nx; ++ix)
        if (img.get(ix, iy))
          row[ix >> 3] = static_cast<char>(row[ix >> 3] | (0x80 >> (ix & 7)));
      bytes += row;
    }
  } else {
    bytes = "P1\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n";
    for (int file_row = 0; file_row < ny; ++file_row) {
      const int iy = ny - 1 - file_row;
      for (int ix = 0; ix < nx; ++ix) {
        bytes += img.get(ix, iy) ? '1' : '0';
        bytes += ix + 1 == nx ? '\n' : ' ';
      }
    }
  }
  write_binary(path, bytes);
}

BinaryImage read_pbm(const std::string& path, double eps, BoundaryMode mode) {
  const std::string data = read_text_file(path);
  ByteCursor cur{data, 0, path};

  if (data.size() < 2 || data[0] != 'P' || (data[1] != '1' && data[1] != '4'))
    cur.fail("expected PBM magic P1 or P4");
  const bool packed = data[1] == '4';
  cur.pos = 2;

  const int nx = cur.parse_nat("width");
  const int ny = cur.parse_nat("height");
  if (nx < 1 || ny < 1) cur.fail("dimensions must be positive");

  BinaryImage img;
  img.dims = GridDims{nx, ny};
  img.eps = eps;
  img.origin = Vec2{0.0, 0.0};
  img.mode = mode;
  img.bits.assign(static_cast<std::size_t>(nx) * ny, 0);

  if (packed) {
    // Exactly one whitespace byte separates the header from the raster.
    if (cur.eof() || !std::isspace(static_cast<unsigned char>(cur.peek())))
      cur.fail("expected single whitespace before raster");
    ++cur.pos;
    const int row_bytes = (nx + 7) / 8;
    for (int file_row = 0; file_row < ny; ++file_row) {
      const int iy = ny - 1 - file_row;
      if (cur.pos + static_cast<std::size_t>(row_bytes) > data.size())
        cur.fail("raster truncated");
      for (int ix = 0; ix < nx; ++ix) {
        const unsigned char byte =
            static_cast<unsigned char>(data[cur.pos + (ix >> 3)]);
        img.bits[img.index(ix, iy)] = (byte >> (7 - (ix & 7))) & 1;
      }
      cur.pos += static_cast<std::size_t>(row_bytes);
    }
  } else {
    for (int file_row = 0; file_row < ny; ++file_row) {
      const int iy = ny - 1 - file_row;
      for (int ix = 0; ix < nx; ++ix) {
        cur.skip_ws_and_comments();
        if (cur.eof()) cur.fail("raster truncated");
        const char c = cur.peek();
        if (c != '0' && c != '1') cur.fail("expected pixel 0 or 1");
        img.bits[img.index(ix, iy)] = c == '1' ? 1 : 0;
        ++cur.pos;
      }
    }
  }
  return img;
}

void write_pgm16(const std::string& pgm_path, const std::string& sidecar_path,
                 const FieldSample& field, const nlohmann::json& extra) {
  const int nx = field.dims.nx, ny = field.dims.ny;
  double lo = field.values[0], hi = field.values[0];
  for (double v : field.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi - lo;
  const double inv = scale > 0.0 ? 65535.0 / scale : 0.0;

  std::string bytes = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n65535\n";
  bytes.reserve(bytes.size() + static_cast<std::size_t>(nx) * ny * 2);
  for (int file_row = 0; file_row < ny; ++file_row) {
    const int iy = ny - 1 - file_row;
    for (int ix = 0; ix < nx; ++ix) {
      const double v = field.at(ix, iy);
      const long raw = std::lround((v - lo) * inv);
      const unsigned u = static_cast<unsigned>(std::clamp(raw, 0L, 65535L));
      bytes += static_cast<char>((u >> 8) & 0xff);  // big-endian per netpbm
      bytes += static_cast<char>(u & 0xff);
    }
  }
  write_binary(pgm_path, bytes);

  nlohmann::json sidecar = extra;
  sidecar["format"] = "pgm16";
  sidecar["dims"] = {nx, ny};
  sidecar["eps"] = field.eps;
  sidecar["origin"] = {field.origin.x, field.origin.y};
  sidecar["mode"] = to_string(field.mode);
  sidecar["seed"] = field.seed;
  sidecar["offset"] = lo;
  sidecar["scale"] = scale;
  write_text_file(sidecar_path, sidecar.dump(2) + "\n");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string summary_csv(const SummaryStats& stats) {
  std::string out = "lambda,functional,mean,sd,se,predicted,z\n";
  for (const StatRow& row : stats.rows) {
    out += format_double(row.lambda) + "," + row.functional + "," + format_double(row.mean) +
           "," + format_double(row.sd) + "," + format_double(row.se) + "," +
           format_double(row.predicted) + "," + format_double(row.z) + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "stride,eps,lambda,chi_mean,components4_mean,holes8_mean,anti_mean,main_mean,"
      "cells_per_pixel\n";
  for (const SweepRow& row : rows) {
    out += std::to_string(row.stride) + "," + format_double(row.eps) + "," +
           format_double(row.lambda) + "," + format_double(row.chi_mean) + "," +
           format_double(row.components4_mean) + "," + format_double(row.holes8_mean) + "," +
           format_double(row.anti_mean) + "," + format_double(row.main_mean) + "," +
           format_double(row.cells_per_pixel) + "\n";
  }
  return out;
}

nlohmann::json report_json(const TopologyReport& report) {
  nlohmann::json j;
  j["dims"] = {report.dims.nx, report.dims.ny};
  j["eps"] = report.eps;
  j["mode"] = to_string(report.mode);
  j["chi_bicov"] = report.chi_bicov;
  j["chi_complex"] = report.chi_complex;
  j["n_plus"] = report.configs.n_plus;
  j["n_minus"] = report.configs.n_minus;
  j["components_4"] = report.components_4;
  j["holes_8"] = report.holes_8;
  // On a torus there is no unbounded outer region; holes_8 is then just
  // "background components minus one" and should be read with that in mind.
  j["holes_torus_semantics"] = report.mode == BoundaryMode::Torus;
  j["per_u1"] = report.per.per_u1;
  j["per_u2"] = report.per.per_u2;
  j["per_inf"] = report.per.per_inf;
  j["area"] = report.area;
  j["checkerboard_anti"] = report.cells.anti;
  j["checkerboard_main"] = report.cells.main;
  j["checkerboard_cells"] = report.cells.anti + report.cells.main;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  write_binary(path, content);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace exctop
