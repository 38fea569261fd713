#include "randclust/spec_io.hpp"

#include <fstream>
#include <istream>

#include <json.hpp>

#include "randclust/errors.hpp"

namespace randclust {

namespace {

using json = nlohmann::json;

std::vector<NodeId> to_sizes(const json& arr, const char* name) {
    if (!arr.is_array()) throw ParseError(std::string("spec field ") + name + " must be an array");
    std::vector<NodeId> out;
    for (const auto& v : arr) {
        if (!v.is_number_unsigned()) throw ParseError(std::string(name) + " entries must be unsigned");
        out.push_back(v.get<NodeId>());
    }
    return out;
}

Vector to_vector(const json& arr, const char* name) {
    if (!arr.is_array()) throw ParseError(std::string("spec field ") + name + " must be an array");
    Vector out(arr.size());
    Eigen::Index i = 0;
    for (const auto& v : arr) {
        if (!v.is_number()) throw ParseError(std::string(name) + " entries must be numbers");
        out(i++) = v.get<double>();
    }
    return out;
}

}  // namespace

ModelSpec read_model_spec(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("spec JSON parse error: ") + e.what());
    }
    for (const char* field : {"n", "ky", "kz", "b", "row_sizes", "col_sizes"})
        if (!doc.contains(field))
            throw ParseError(std::string("spec is missing field ") + field);

    ScbmSpec spec;
    spec.n = doc["n"].get<NodeId>();
    spec.ky = doc["ky"].get<int>();
    spec.kz = doc["kz"].get<int>();
    const json& b = doc["b"];
    if (!b.is_array() || b.empty() || !b[0].is_array())
        throw ParseError("spec field b must be a matrix (array of arrays)");
    spec.b.resize(b.size(), b[0].size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!b[i].is_array() || b[i].size() != b[0].size())
            throw ParseError("spec field b must be rectangular");
        for (std::size_t j = 0; j < b[i].size(); ++j) spec.b(i, j) = b[i][j].get<double>();
    }
    spec.row_sizes = to_sizes(doc["row_sizes"], "row_sizes");
    spec.col_sizes = to_sizes(doc["col_sizes"], "col_sizes");

    if (doc.contains("theta_y") || doc.contains("theta_z")) {
        DcScbmSpec dc;
        dc.base = std::move(spec);
        dc.theta_y = doc.contains("theta_y") ? to_vector(doc["theta_y"], "theta_y")
                                             : Vector::Ones(dc.base.n);
        dc.theta_z = doc.contains("theta_z") ? to_vector(doc["theta_z"], "theta_z")
                                             : Vector::Ones(dc.base.n);
        dc.validate();
        return dc;
    }
    spec.validate();
    return spec;
}

ModelSpec read_model_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spec file " + path);
    return read_model_spec(in);
}

const ScbmSpec& base_spec(const ModelSpec& spec) {
    if (const auto* s = std::get_if<ScbmSpec>(&spec)) return *s;
    return std::get<DcScbmSpec>(spec).base;
}

}  // namespace randclust
