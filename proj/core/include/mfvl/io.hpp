#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mfvl/grid.hpp"
#include "mfvl/operators.hpp"

namespace mfvl {

/// Binary dump layout: a 64-byte little-endian header followed by raw doubles.
///   char[4] "MFVL", u32 version, u32 kind, u32 d, u32 n, u32 nv,
///   f64 L, f64 Lv, f64 eps, u64 count, f64 particles
/// Payloads: field values; complex pairs; phase-space values (x-major);
/// low-rank states store `count` occupations then the orbital matrix
/// column by column as complex pairs.
enum class DumpKind : std::uint32_t { field = 1, complex_field = 2, phase_space = 3, low_rank = 4 };

inline constexpr std::uint32_t kDumpVersion = 1;

void write_dump(const std::filesystem::path& path, const Field& f);
void write_dump(const std::filesystem::path& path, const ComplexField& f);
void write_dump(const std::filesystem::path& path, const PhaseSpaceField& f);
void write_dump(const std::filesystem::path& path, const LowRankState& s);

Field read_field(const std::filesystem::path& path);
ComplexField read_complex_field(const std::filesystem::path& path);
PhaseSpaceField read_phase_space(const std::filesystem::path& path);
LowRankState read_low_rank(const std::filesystem::path& path);

/// Kind stored in a dump header (ValidationError for foreign files).
DumpKind dump_kind(const std::filesystem::path& path);

/// CSV with a header row; numbers printed with 17 significant digits so
/// identical values always produce identical bytes.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void close();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t width_;
  std::string buffer_;
};

std::string format_number(double x);

}  // namespace mfvl
