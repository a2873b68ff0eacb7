#include "output.hpp"

#include <cmath>
#include <system_error>

#include "ovsim/config_text.hpp"
#include "ovsim/thermal.hpp"

namespace ovsim::cli {

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return config::format_number(v);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& hash,
                     std::initializer_list<std::string_view> header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::system_error(errno, std::generic_category(), "cannot write " + path.string());
  out_ << "# config_hash=" << hash << '\n';
  for (auto h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  if (!first_) out_ << ',';
  out_ << s;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(number(v)); }
CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_curve(const std::filesystem::path& path, const std::string& hash, const ModeResult& result) {
  CsvWriter csv(path, hash, {"time", "T", "error"});
  for (const auto& p : result.curve) {
    csv.cell(p.time).cell(p.crystal_T).cell(p.error);
    csv.end_row();
  }
}

void write_report(const std::filesystem::path& path, const std::string& hash, std::span<const ModeResult> results) {
  CsvWriter csv(path, hash, {"mode", "angle", "hwv", "total", "corrected_total"});
  for (const auto& r : results) {
    csv.cell(r.name).cell(r.mean_angle).cell(r.hwv).cell(r.total_error).cell(r.corrected_total);
    csv.end_row();
  }
}

void write_temperatures(const std::filesystem::path& path, const std::string& hash, const VoxelMesh& mesh,
                        std::span<const double> T) {
  CsvWriter csv(path, hash, {"node", "x", "y", "z", "T"});
  for (std::size_t n = 0; n < mesh.active_nodes.size(); ++n) {
    const Vec3 p = mesh.node_position(mesh.active_nodes[n]);
    csv.cell(static_cast<long long>(n)).cell(p.x).cell(p.y).cell(p.z).cell(T[n]);
    csv.end_row();
  }
}

void write_stress(const std::filesystem::path& path, const std::string& hash, const VoxelMesh& mesh,
                  const StressField& stress) {
  CsvWriter csv(path, hash, {"element", "x", "y", "z", "s11", "s22", "s33", "s12", "s23", "s13", "von_mises"});
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.element_count()); ++e) {
    if (mesh.material[e] == kVoid) continue;
    const Vec3 c = mesh.element_centroid(e);
    const SymTensor& s = stress.stress[e];
    csv.cell(static_cast<long long>(e)).cell(c.x).cell(c.y).cell(c.z);
    for (double v : s.c) csv.cell(v);
    csv.cell(von_mises(s));
    csv.end_row();
  }
}

void write_field(const std::filesystem::path& path, const std::string& hash, const VoxelMesh& mesh,
                 const PotentialField& field) {
  CsvWriter csv(path, hash, {"element", "x", "y", "z", "Ex", "Ey", "Ez", "magnitude"});
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(mesh.element_count()); ++e) {
    if (mesh.material[e] != mesh.crystal_material) continue;
    const Vec3 c = mesh.element_centroid(e);
    const Vec3 E = field.field[e];
    csv.cell(static_cast<long long>(e)).cell(c.x).cell(c.y).cell(c.z).cell(E.x).cell(E.y).cell(E.z);
    csv.cell(std::sqrt(E.x * E.x + E.y * E.y + E.z * E.z));
    csv.end_row();
  }
}

}  // namespace ovsim::cli
