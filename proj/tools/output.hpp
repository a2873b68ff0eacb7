#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "ovsim/electrostatics.hpp"
#include "ovsim/mechanics.hpp"
#include "ovsim/mesh.hpp"
#include "ovsim/optics.hpp"
#include "ovsim/sweep.hpp"

namespace ovsim::cli {

/// CSV file opened with the "# config_hash=..." line and a header row. Numbers are
/// written in shortest round-trip form so reruns produce identical bytes.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash, std::initializer_list<std::string_view> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::string_view s);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

std::string number(double v);

void write_curve(const std::filesystem::path& path, const std::string& hash, const ModeResult& result);
void write_report(const std::filesystem::path& path, const std::string& hash, std::span<const ModeResult> results);
void write_temperatures(const std::filesystem::path& path, const std::string& hash, const VoxelMesh& mesh,
                        std::span<const double> T);
void write_stress(const std::filesystem::path& path, const std::string& hash, const VoxelMesh& mesh,
                  const StressField& stress);
void write_field(const std::filesystem::path& path, const std::string& hash, const VoxelMesh& mesh,
                 const PotentialField& field);

}  // namespace ovsim::cli
