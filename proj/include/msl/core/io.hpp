#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msl/core/error.hpp"
#include "msl/core/types.hpp"

namespace msl {

using json = nlohmann::json;

namespace io_detail {

inline std::size_t line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k)
        if (text[k] == '\n') ++line;
    return line;
}

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
    throw ParseError("field '" + field + "': " + what, 0, field);
}

inline const json& member(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) field_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

inline long long get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) field_error(path, "expected an integer");
    return v.get<long long>();
}

inline double get_real(const json& v, const std::string& path) {
    if (!v.is_number()) field_error(path, "expected a number");
    return v.get<double>();
}

inline bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) field_error(path, "expected a boolean");
    return v.get<bool>();
}

inline cplx get_complex(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) field_error(path, "expected [re, im]");
    return {get_real(v[0], path + "[0]"), get_real(v[1], path + "[1]")};
}

inline Mat get_matrix(const json& v, int r, const std::string& path) {
    if (!v.is_array() || v.size() != static_cast<std::size_t>(r))
        field_error(path, "expected " + fmt_num(r) + " rows");
    Mat a(r, r);
    for (int i = 0; i < r; ++i) {
        const std::string rp = path + "[" + fmt_num(i) + "]";
        const json& row = v[i];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(r))
            field_error(rp, "expected " + fmt_num(r) + " entries");
        for (int j = 0; j < r; ++j) a(i, j) = get_complex(row[j], rp + "[" + fmt_num(j) + "]");
    }
    return a;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace io_detail

/// [re, im] pairs; doubles are written shortest-round-trip, so reading back is bit-exact.
inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Mat& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(to_json(a(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const MatrixGrid& g) {
    json values = json::array();
    for (const auto& a : g.values()) values.push_back(to_json(a));
    return {{"r", g.r()}, {"m", g.spec().m()}, {"hermitian", g.hermitian()}, {"values", std::move(values)}};
}

inline json to_json(const SpectralData& d) {
    json entries = json::array();
    for (const auto& e : d.entries()) entries.push_back({{"lambda", e.lambda}, {"alpha", to_json(e.alpha)}});
    return {{"r", d.r()}, {"includes_zero", d.includes_zero()}, {"entries", std::move(entries)}};
}

/// Parses JSON text; syntax errors become ParseError with the 1-based line.
inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is the 1-based position of the last character read.
        const std::size_t last = e.byte > 0 ? e.byte - 1 : 0;
        throw ParseError(std::string("malformed JSON: ") + e.what(), io_detail::line_of(text, last), "");
    }
}

inline json read_json(const std::string& path) { return parse_json(io_detail::read_file(path)); }

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(1) << '\n';
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline MatrixGrid matrix_grid_from_json(const json& j) {
    using namespace io_detail;
    const long long r = get_int(member(j, "r", ""), "r");
    const long long m = get_int(member(j, "m", ""), "m");
    const bool herm = get_bool(member(j, "hermitian", ""), "hermitian");
    if (r < 1 || r > kMaxDim) field_error("r", "must be in [1, " + fmt_num(kMaxDim) + "]");
    if (m < GridSpec::kMinIntervals) field_error("m", "must be >= " + fmt_num(GridSpec::kMinIntervals));
    const json& vals = member(j, "values", "");
    if (!vals.is_array() || vals.size() != static_cast<std::size_t>(m + 1))
        field_error("values", "expected " + fmt_num(m + 1) + " matrices");
    std::vector<Mat> v;
    v.reserve(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
        v.push_back(get_matrix(vals[i], static_cast<int>(r), "values[" + fmt_num(i) + "]"));
    return MatrixGrid(static_cast<int>(r), GridSpec(static_cast<int>(m)), std::move(v), herm);
}

inline SpectralData spectral_data_from_json(const json& j) {
    using namespace io_detail;
    const long long r = get_int(member(j, "r", ""), "r");
    if (r < 1 || r > kMaxDim) field_error("r", "must be in [1, " + fmt_num(kMaxDim) + "]");
    const bool iz = get_bool(member(j, "includes_zero", ""), "includes_zero");
    const json& ents = member(j, "entries", "");
    if (!ents.is_array()) field_error("entries", "expected an array");
    std::vector<SpectralEntry> entries;
    entries.reserve(ents.size());
    for (std::size_t k = 0; k < ents.size(); ++k) {
        const std::string p = "entries[" + fmt_num(k) + "]";
        entries.push_back({get_real(member(ents[k], "lambda", p), p + ".lambda"),
                           get_matrix(member(ents[k], "alpha", p), static_cast<int>(r), p + ".alpha")});
    }
    return SpectralData(static_cast<int>(r), iz, std::move(entries));
}

inline MatrixGrid load_matrix_grid(const std::string& path) { return matrix_grid_from_json(read_json(path)); }

/// `extra` members (e.g. {"kind": "potential_primitive"}) are merged into the top-level object.
inline void save_matrix_grid(const std::string& path, const MatrixGrid& g, const json& extra = json::object()) {
    json j = to_json(g);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_json(path, j);
}

inline SpectralData load_spectral_data(const std::string& path) { return spectral_data_from_json(read_json(path)); }

inline void save_spectral_data(const std::string& path, const SpectralData& d, const json& extra = json::object()) {
    json j = to_json(d);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_json(path, j);
}

}  // namespace msl
