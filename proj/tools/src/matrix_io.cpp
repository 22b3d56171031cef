#include "matrix_io.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

namespace nrdcli {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError(path + ": cannot open for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

std::size_t get_dim(const json& j, const std::string& path, const char* field) {
    if (!j.contains(field))
        throw IoError(path + ": missing field: " + std::string(field));
    if (!j[field].is_number_unsigned() || j[field].get<std::size_t>() == 0)
        throw IoError(path + ": field " + std::string(field) +
                      " must be a positive integer");
    return j[field].get<std::size_t>();
}

} // namespace

nrd::CMatrix parse_matrix(const std::string& path) {
    const json j = load_json(path);
    if (!j.is_object())
        throw IoError(path + ": top level must be an object");
    const std::size_t rows = get_dim(j, path, "rows");
    const std::size_t cols = get_dim(j, path, "cols");
    if (!j.contains("data"))
        throw IoError(path + ": missing field: data");
    const json& data = j["data"];
    if (!data.is_array() || data.size() != rows)
        throw IoError(path + ": data must be an array of " + std::to_string(rows) + " rows");

    nrd::CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = data[i];
        if (!row.is_array() || row.size() != cols)
            throw IoError(path + ": data[" + std::to_string(i) + "] must be an array of " +
                          std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) {
            const json& entry = row[c];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number())
                throw IoError(path + ": data[" + std::to_string(i) + "][" +
                              std::to_string(c) + "] must be a [re, im] number pair");
            const double re = entry[0].get<double>();
            const double im = entry[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im))
                throw IoError(path + ": data[" + std::to_string(i) + "][" +
                              std::to_string(c) + "] is not finite");
            m(i, c) = nrd::cplx(re, im);
        }
    }
    return m;
}

void serialize_matrix(const nrd::CMatrix& m, const std::string& path) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    json data = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c)
            row.push_back({m(i, c).real(), m(i, c).imag()});
        data.push_back(std::move(row));
    }
    j["data"] = std::move(data);
    write_atomic(path, j.dump(2) + "\n");
}

void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw IoError(tmp.string() + ": cannot open for writing");
        out << text;
        out.flush();
        if (!out)
            throw IoError(tmp.string() + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        throw IoError(path + ": rename failed: " + ec.message());
}

} // namespace nrdcli
