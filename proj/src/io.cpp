#include "pmhd/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "pmhd/errors.hpp"

namespace pmhd {

void write_field(const std::filesystem::path& path, const Field2D& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_field: cannot open " + path.string());
    out.write("MHDF1", 5);
    std::uint32_t nx = std::uint32_t(f.nx()), ny = std::uint32_t(f.ny());
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&ny), 4);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              std::streamsize(f.v.size() * sizeof(double)));

    std::ofstream hdr(path.string() + ".hdr");
    hdr << "frame " << frame_name(f.frame) << "\nnx " << nx << "\nny " << ny << "\nxs";
    for (double x : f.xs.nodes) hdr << " " << format_double(x);
    hdr << "\nys";
    for (double y : f.ys.nodes) hdr << " " << format_double(y);
    hdr << "\n";
}

Field2D read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("read_field: cannot open " + path.string());
    char magic[5];
    in.read(magic, 5);
    if (std::memcmp(magic, "MHDF1", 5) != 0) throw Error("read_field: bad magic");
    std::uint32_t nx = 0, ny = 0;
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    std::vector<double> vals(std::size_t(nx) * ny);
    in.read(reinterpret_cast<char*>(vals.data()), std::streamsize(vals.size() * sizeof(double)));

    std::ifstream hdr(path.string() + ".hdr");
    if (!hdr) throw NotFoundError("read_field: missing sidecar header");
    std::string tok, frame;
    hdr >> tok >> frame >> tok;
    std::size_t nx2, ny2;
    hdr >> nx2 >> tok >> ny2 >> tok;
    std::vector<double> xs(nx2), ys(ny2);
    for (auto& x : xs) hdr >> x;
    hdr >> tok;
    for (auto& y : ys) hdr >> y;
    Frame fr = Frame::y;
    for (Frame f2 : {Frame::eta, Frame::y, Frame::Y, Frame::x, Frame::z})
        if (frame == frame_name(f2)) fr = f2;
    Field2D f(Grid1D(xs, GridKind::stretched, Frame::x), Grid1D(ys, GridKind::stretched, fr), fr);
    f.v = std::move(vals);
    return f;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& cols)
    : path_(path) {
    for (std::size_t i = 0; i < cols.size(); ++i) buf_ += (i ? "," : "") + cols[i];
    buf_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        buf_ += (i ? "," : "") + format_double(values[i]);
    buf_ += "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) buf_ += (i ? "," : "") + values[i];
    buf_ += "\n";
}

CsvWriter::~CsvWriter() {
    std::ofstream out(path_);
    out << buf_;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("file_hash: cannot open " + path.string());
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= std::uint64_t(static_cast<unsigned char>(c));
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace pmhd
