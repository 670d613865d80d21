#include "qtraj/output.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/hydro.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>

namespace qtraj {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()), path_(path) {
    if (!out_) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> cells) {
    if (cells.size() != columns_) throw ShapeError("CsvWriter: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << format_number(cells[i]);
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw IoError("error while writing " + path_.string());
}

FieldFrame field_frame(double t, const Wavefunction& psi, const PhysicalConstants& consts, const FieldOptions& opts) {
    const HydroState h = polar_decompose(psi, consts, opts);
    FieldFrame f;
    f.t = t;
    f.psi = psi;
    f.rho = h.rho;
    f.S = h.S;
    f.v = h.v;
    f.vq = quantum_potential(h, consts, opts.stencil_order);
    f.mask = h.mask;
    return f;
}

void write_trajectories_csv(const std::filesystem::path& path, std::span<const TrajectoryEnsemble> frames,
                            int stencil_order) {
    CsvWriter w(path, {"t", "a", "q", "qdot", "jacobian", "rho"});
    for (const auto& e : frames) {
        const auto J = jacobian(e, stencil_order);
        const auto& r0 = e.label_density();
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double cells[] = {e.t, e.labels.a(i), e.q[i], e.qdot[i], J[i], r0[i] / J[i]};
            w.row(cells);
        }
    }
    w.close();
}

void write_fields_csv(const std::filesystem::path& path, std::span<const FieldFrame> frames) {
    CsvWriter w(path, {"t", "x", "re_psi", "im_psi", "rho", "S", "v", "vq", "mask"});
    for (const auto& f : frames) {
        const GridSpec& g = f.psi.grid;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double cells[] = {f.t,     g.x(i), f.psi.values[i].real(), f.psi.values[i].imag(),
                                    f.rho[i], f.S[i], f.v[i],                 f.vq[i],
                                    f.mask[i] ? 1.0 : 0.0};
            w.row(cells);
        }
    }
    w.close();
}

void write_protective_csv(const std::filesystem::path& path, std::span<const ProtectiveRecord> records) {
    CsvWriter w(path, {"x", "shift_density", "shift_current", "T"});
    for (const auto& r : records) {
        const double cells[] = {r.x_point, r.shift_density, r.shift_current, r.T};
        w.row(cells);
    }
    w.close();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    out.close();
    if (out.fail()) throw IoError("error while writing " + path.string());
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("SHA-256 unavailable");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[digest[i] >> 4];
        s += hex[digest[i] & 0xF];
    }
    return s;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_)) throw IoError("cannot create output directory " + root_.string());
}

std::filesystem::path OutputDir::file(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return root_ / name;
}

void OutputDir::write_manifest() {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& name : files_) {
        const auto p = root_ / name;
        if (!std::filesystem::exists(p)) continue;
        entries.push_back({{"path", name},
                           {"bytes", static_cast<std::uint64_t>(std::filesystem::file_size(p))},
                           {"sha256", sha256_file(p)}});
    }
    write_json(root_ / "manifest.json", {{"files", entries}});
}

}  // namespace qtraj
