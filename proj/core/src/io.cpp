#include "mfvl/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "mfvl/errors.hpp"

namespace mfvl {

namespace {

#pragma pack(push, 1)
struct Header {
  char magic[4];
  std::uint32_t version;
  std::uint32_t kind;
  std::uint32_t d;
  std::uint32_t n;
  std::uint32_t nv;
  double L;
  double Lv;
  double eps;
  std::uint64_t count;
  double particles;
};
#pragma pack(pop)
static_assert(sizeof(Header) == 64, "dump header must be 64 bytes");

Header make_header(DumpKind kind, const GridSpec& g, std::uint64_t count) {
  Header h{};
  std::memcpy(h.magic, "MFVL", 4);
  h.version = kDumpVersion;
  h.kind = static_cast<std::uint32_t>(kind);
  h.d = static_cast<std::uint32_t>(g.dim());
  h.n = static_cast<std::uint32_t>(g.points());
  h.L = g.length();
  h.count = count;
  return h;
}

void write_raw(const std::filesystem::path& path, const Header& h, const void* data, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

struct Loaded {
  Header h;
  std::vector<double> data;
};

Loaded read_raw(const std::filesystem::path& path, DumpKind expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  Loaded l{};
  in.read(reinterpret_cast<char*>(&l.h), sizeof(l.h));
  if (!in || std::memcmp(l.h.magic, "MFVL", 4) != 0) throw ValidationError("'" + path.string() + "' is not a dump file");
  if (l.h.version != kDumpVersion) throw ValidationError("unsupported dump version in '" + path.string() + "'");
  if (l.h.kind != static_cast<std::uint32_t>(expected)) throw ValidationError("dump '" + path.string() + "' has a different kind");
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg()) - sizeof(Header);
  in.seekg(sizeof(Header));
  if (bytes % sizeof(double) != 0) throw ValidationError("truncated dump '" + path.string() + "'");
  l.data.resize(bytes / sizeof(double));
  in.read(reinterpret_cast<char*>(l.data.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw ValidationError("failed reading '" + path.string() + "'");
  return l;
}

GridSpec grid_of(const Header& h) { return GridSpec(static_cast<int>(h.d), static_cast<int>(h.n), h.L); }

void require_size(const Loaded& l, std::size_t doubles) {
  if (l.data.size() != doubles) throw ValidationError("dump payload size does not match its header");
}

}  // namespace

void write_dump(const std::filesystem::path& path, const Field& f) {
  write_raw(path, make_header(DumpKind::field, f.grid, f.size()), f.values.data(), f.size() * sizeof(double));
}

void write_dump(const std::filesystem::path& path, const ComplexField& f) {
  write_raw(path, make_header(DumpKind::complex_field, f.grid, f.size()), f.values.data(), f.size() * sizeof(cplx));
}

void write_dump(const std::filesystem::path& path, const PhaseSpaceField& f) {
  Header h = make_header(DumpKind::phase_space, f.xgrid, f.size());
  h.nv = static_cast<std::uint32_t>(f.vgrid.points());
  h.Lv = f.vgrid.length();
  write_raw(path, h, f.values.data(), f.size() * sizeof(double));
}

void write_dump(const std::filesystem::path& path, const LowRankState& s) {
  Header h = make_header(DumpKind::low_rank, s.grid, static_cast<std::uint64_t>(s.rank()));
  h.eps = s.eps;
  h.particles = s.particles;
  std::vector<double> payload(static_cast<std::size_t>(s.rank()));
  for (Eigen::Index k = 0; k < s.rank(); ++k) payload[static_cast<std::size_t>(k)] = s.occupations[k];
  const double* orb = reinterpret_cast<const double*>(s.orbitals.data());
  payload.insert(payload.end(), orb, orb + 2 * s.orbitals.size());
  write_raw(path, h, payload.data(), payload.size() * sizeof(double));
}

Field read_field(const std::filesystem::path& path) {
  Loaded l = read_raw(path, DumpKind::field);
  GridSpec g = grid_of(l.h);
  require_size(l, g.size());
  return Field(g, std::move(l.data));
}

ComplexField read_complex_field(const std::filesystem::path& path) {
  Loaded l = read_raw(path, DumpKind::complex_field);
  GridSpec g = grid_of(l.h);
  require_size(l, 2 * g.size());
  ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cplx(l.data[2 * i], l.data[2 * i + 1]);
  return f;
}

PhaseSpaceField read_phase_space(const std::filesystem::path& path) {
  Loaded l = read_raw(path, DumpKind::phase_space);
  GridSpec xg = grid_of(l.h);
  GridSpec vg(static_cast<int>(l.h.d), static_cast<int>(l.h.nv), l.h.Lv);
  PhaseSpaceField f(xg, vg);
  require_size(l, f.size());
  f.values = std::move(l.data);
  return f;
}

LowRankState read_low_rank(const std::filesystem::path& path) {
  Loaded l = read_raw(path, DumpKind::low_rank);
  LowRankState s;
  s.grid = grid_of(l.h);
  s.eps = l.h.eps;
  s.particles = l.h.particles;
  const auto K = static_cast<Eigen::Index>(l.h.count);
  const auto rows = static_cast<Eigen::Index>(s.grid.size());
  require_size(l, static_cast<std::size_t>(K + 2 * rows * K));
  s.occupations = Eigen::Map<const Eigen::VectorXd>(l.data.data(), K);
  s.orbitals.resize(rows, K);
  const double* src = l.data.data() + K;
  for (Eigen::Index i = 0; i < rows * K; ++i) s.orbitals.data()[i] = cplx(src[2 * i], src[2 * i + 1]);
  return s;
}

DumpKind dump_kind(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in || std::memcmp(h.magic, "MFVL", 4) != 0) throw ValidationError("'" + path.string() + "' is not a dump file");
  if (h.kind < 1 || h.kind > 4) throw ValidationError("unknown dump kind in '" + path.string() + "'");
  return static_cast<DumpKind>(h.kind);
}

std::string format_number(double x) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : path_(path), width_(columns.size()) {
  require(!columns.empty(), "CSV needs at least one column");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += columns[i];
  }
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  require(values.size() == width_, "CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_number(values[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path_.string() + "' for writing");
  out << buffer_;
  if (!out) throw ValidationError("failed writing '" + path_.string() + "'");
}

}  // namespace mfvl
