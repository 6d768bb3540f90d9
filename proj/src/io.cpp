#include "rkbayes/io.hpp"

#include <fstream>

namespace rkbayes::io {

using nlohmann::json;

json json_of(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json json_of(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("expected a JSON array of numbers");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
    return v;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a JSON array of rows");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(j[i].size()) != cols)
            throw ConfigError("ragged JSON matrix");
        for (Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

json json_of(const model::DatasetPair& data) {
    json j;
    j["x"] = json_of(data.x);
    j["y"] = json_of(data.y);
    j["u"] = json::array();
    j["f"] = json::array();
    for (const auto& uk : data.u) j["u"].push_back(json_of(uk));
    for (const auto& fk : data.f) j["f"].push_back(json_of(fk));
    return j;
}

model::DatasetPair dataset_from_json(const json& j) {
    model::DatasetPair data;
    data.x = vector_from_json(j.at("x"));
    data.y = vector_from_json(j.at("y"));
    for (const auto& uk : j.at("u")) data.u.push_back(vector_from_json(uk));
    for (const auto& fk : j.at("f")) data.f.push_back(vector_from_json(fk));
    data.dx = data.x.size() > 1 ? data.x(1) - data.x(0) : 1.0;
    data.dy = data.y.size() > 1 ? data.y(1) - data.y(0) : 1.0;
    data.validate();
    return data;
}

json json_of(const assembly::RegressionSystem& sys) {
    json j;
    j["A"] = json_of(sys.A_bar.mat());
    j["b"] = json_of(sys.b_bar);
    j["B"] = json_of(sys.B.mat());
    j["sigma"] = sys.sigma_eta;
    json meta;
    meta["mode"] = sys.meta.mode;
    meta["n_pairs"] = sys.meta.n_pairs;
    meta["grid_in"] = sys.meta.grid_in;
    meta["grid_out"] = sys.meta.grid_out;
    meta["l_full"] = sys.meta.l_full;
    meta["kept"] = sys.meta.kept;
    if (sys.meta.loss_const) meta["loss_const"] = *sys.meta.loss_const;
    j["meta"] = std::move(meta);
    return j;
}

assembly::RegressionSystem system_from_json(const json& j) {
    assembly::RegressionSystem sys;
    sys.A_bar = SymMatrix(matrix_from_json(j.at("A")));
    sys.b_bar = vector_from_json(j.at("b"));
    sys.B = SymMatrix(matrix_from_json(j.at("B")));
    sys.sigma_eta = j.value("sigma", 0.0);
    if (j.contains("meta")) {
        const auto& meta = j.at("meta");
        sys.meta.mode = meta.value("mode", "");
        sys.meta.n_pairs = meta.value("n_pairs", Index{0});
        sys.meta.grid_in = meta.value("grid_in", Index{0});
        sys.meta.grid_out = meta.value("grid_out", Index{0});
        sys.meta.l_full = meta.value("l_full", sys.A_bar.n());
        if (meta.contains("kept"))
            sys.meta.kept = meta.at("kept").get<std::vector<Index>>();
        if (meta.contains("loss_const"))
            sys.meta.loss_const = meta.at("loss_const").get<double>();
    } else {
        sys.meta.l_full = sys.A_bar.n();
    }
    if (sys.b_bar.size() != sys.A_bar.n() || sys.B.n() != sys.A_bar.n())
        throw DimensionMismatch("system_from_json: inconsistent dimensions");
    return sys;
}

json json_of(const GaussianCoeff& g) {
    json j;
    j["mean"] = json_of(g.mean);
    j["cov"] = json_of(g.cov.mat());
    return j;
}

GaussianCoeff gaussian_from_json(const json& j) {
    GaussianCoeff g;
    g.mean = vector_from_json(j.at("mean"));
    g.cov = SymMatrix(matrix_from_json(j.at("cov")));
    if (g.mean.size() != g.cov.n())
        throw DimensionMismatch("gaussian_from_json: mean/cov size mismatch");
    return g;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace rkbayes::io
