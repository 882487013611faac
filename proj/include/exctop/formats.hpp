#pragma once

#include <string>
#include <vector>

#include "exctop/binary_image.hpp"
#include "exctop/experiment.hpp"
#include "exctop/field.hpp"
#include "exctop/topology.hpp"

#include "json.hpp"

namespace exctop {

/// Writes a PBM (P4 packed by default, P1 ASCII otherwise). File rows are
/// top-first, so internal row iy lands on file row ny-1-iy.
void write_pbm(const std::string& path, const BinaryImage& img, bool binary = true);

/// Reads a P1 or P4 PBM. The format carries no geometry, so eps and boundary
/// mode are supplied by the caller. Malformed input raises ParseError with
/// the byte offset of the problem.
BinaryImage read_pbm(const std::string& path, double eps = 1.0,
                     BoundaryMode mode = BoundaryMode::Bounded);

/// Writes the field as a 16-bit big-endian PGM (P5) with an affine scaling
/// value = offset + scale * raw / 65535, plus a JSON sidecar recording the
/// scaling and the sampling geometry so the field is recoverable.
void write_pgm16(const std::string& pgm_path, const std::string& sidecar_path,
                 const FieldSample& field, const nlohmann::json& extra = {});

/// Summary table as CSV with the fixed column order
/// lambda,functional,mean,sd,se,predicted,z.
std::string summary_csv(const SummaryStats& stats);

/// Sweep table as CSV, coarse rows first if the strides were given that way.
std::string sweep_csv(const std::vector<SweepRow>& rows);

nlohmann::json report_json(const TopologyReport& report);

std::string format_double(double v);  // shortest stable decimal used in CSVs

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace exctop
