#pragma once

#include "qtraj/lagrangian.hpp"
#include "qtraj/protective.hpp"
#include "qtraj/state.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace qtraj {

// Locale-independent decimal with 17 significant digits;
// non-finite values print as nan, inf, -inf.
std::string format_number(double x);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(std::span<const double> cells);
    void close();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::filesystem::path path_;
};

/// One Eulerian snapshot for fields.csv.
struct FieldFrame {
    double t = 0.0;
    Wavefunction psi;
    std::vector<double> rho;
    std::vector<double> S;
    std::vector<double> v;
    std::vector<double> vq;
    Mask mask;
};

// Polar fields of psi with V_Q; masked points carry NaN.
FieldFrame field_frame(double t, const Wavefunction& psi, const PhysicalConstants& consts, const FieldOptions& opts);

// Columns t, a, q, qdot, jacobian, rho.
void write_trajectories_csv(const std::filesystem::path& path, std::span<const TrajectoryEnsemble> frames,
                            int stencil_order);
// Columns t, x, re_psi, im_psi, rho, S, v, vq, mask.
void write_fields_csv(const std::filesystem::path& path, std::span<const FieldFrame> frames);
// Columns x, shift_density, shift_current, T.
void write_protective_csv(const std::filesystem::path& path, std::span<const ProtectiveRecord> records);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

std::string sha256_file(const std::filesystem::path& path);

/// Output directory that remembers what was written into it.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    // Path for a new file, recorded for the manifest.
    std::filesystem::path file(const std::string& name);
    const std::vector<std::string>& files() const noexcept { return files_; }
    // manifest.json: every recorded file with its size and SHA-256.
    void write_manifest();

private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
};

}  // namespace qtraj
