#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pmhd/grid.hpp"

namespace pmhd {

/// Binary field dump: magic "MHDF1", u32 nx, u32 ny, then nx*ny float64
/// little-endian, station-major. Frame tag and grid vectors go to a sidecar
/// text header at <path>.hdr.
void write_field(const std::filesystem::path& path, const Field2D& f);
Field2D read_field(const std::filesystem::path& path);

/// CSV writer with fixed %.17g formatting (byte-stable across reruns).
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    ~CsvWriter();

  private:
    std::string buf_;
    std::filesystem::path path_;
};

std::string format_double(double v);

/// FNV-1a 64-bit content hash, hex-encoded.
std::string file_hash(const std::filesystem::path& path);

}  // namespace pmhd
