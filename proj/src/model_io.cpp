#include "wipmf/model_io.hpp"

#include <fmt/format.h>

#include <fstream>

namespace wipmf {

using nlohmann::json;

namespace {

Matrix read_matrix(const json& j, const char* key, int d) {
    if (!j.contains(key)) throw Error(fmt::format("model file: missing \"{}\"", key));
    const auto& a = j.at(key);
    if (!a.is_array() || static_cast<int>(a.size()) != d)
        throw Error(fmt::format("model file: \"{}\" must have {} rows", key, d));
    Matrix M(d, d);
    for (int i = 0; i < d; ++i) {
        if (!a[i].is_array() || static_cast<int>(a[i].size()) != d)
            throw Error(fmt::format("model file: row {} of \"{}\" must have {} entries", i, key, d));
        for (int k = 0; k < d; ++k) M(i, k) = a[i][k].get<double>();
    }
    return M;
}

Vector read_vector(const json& j, const char* key, int d, bool optional_zero) {
    if (!j.contains(key)) {
        if (optional_zero) return Vector::Zero(d);
        throw Error(fmt::format("model file: missing \"{}\"", key));
    }
    const auto& a = j.at(key);
    if (!a.is_array() || static_cast<int>(a.size()) != d)
        throw Error(fmt::format("model file: \"{}\" must have {} entries", key, d));
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = a[i].get<double>();
    return v;
}

} // namespace

ModelFile parse_model(const json& j) {
    if (!j.contains("d")) throw Error("model file: missing \"d\"");
    const int d = j.at("d").get<int>();
    if (d < 2) throw Error("model file: d must be >= 2");
    const std::string kind = j.value("kind", std::string("sync"));
    ModelFile out;
    if (j.contains("alpha") && !j.at("alpha").is_null()) out.alpha = j.at("alpha").get<double>();
    if (kind == "sync") {
        out.model = BanditModel{read_matrix(j, "P0", d), read_matrix(j, "P1", d), read_vector(j, "R0", d, true),
                                read_vector(j, "R1", d, false)};
    } else if (kind == "async") {
        out.model = AsyncBanditModel{read_matrix(j, "Q0", d), read_matrix(j, "Q1", d),
                                     read_vector(j, "R0", d, true), read_vector(j, "R1", d, false)};
    } else {
        throw Error("model file: kind must be \"sync\" or \"async\"");
    }
    return out;
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
    return parse_model(j);
}

json matrix_json(const Matrix& A) {
    json rows = json::array();
    for (int i = 0; i < A.rows(); ++i) {
        json r = json::array();
        for (int k = 0; k < A.cols(); ++k) r.push_back(A(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json to_json(const BanditModel& m, std::optional<double> alpha) {
    json j{{"kind", "sync"}, {"d", m.d()},          {"P0", matrix_json(m.P0)},
           {"P1", matrix_json(m.P1)}, {"R0", vector_json(m.R0)}, {"R1", vector_json(m.R1)}};
    if (alpha) j["alpha"] = *alpha;
    return j;
}

json to_json(const AsyncBanditModel& m, std::optional<double> alpha) {
    json j{{"kind", "async"}, {"d", m.d()},          {"Q0", matrix_json(m.Q0)},
           {"Q1", matrix_json(m.Q1)},  {"R0", vector_json(m.R0)}, {"R1", vector_json(m.R1)}};
    if (alpha) j["alpha"] = *alpha;
    return j;
}

} // namespace wipmf
