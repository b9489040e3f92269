#include "qbdr/model_io.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qbdr {

namespace {

using json = nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCategory::Parse, what); }

std::string locate(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail("malformed JSON at " + locate(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) parse_fail(where + ": missing field \"" + key + "\"");
    return obj.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) parse_fail(where + ": expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) parse_fail(where + ": expected an integer");
    return v.get<int>();
}

Vector vector_of(const json& v, const std::string& where) {
    if (!v.is_array()) parse_fail(where + ": expected an array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = number(v[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

Matrix matrix_of(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) parse_fail(where + ": expected a non-empty array of rows");
    const std::size_t rows = v.size();
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string row_where = where + "[" + std::to_string(i) + "]";
        const Vector r = vector_of(v[i], row_where);
        if (static_cast<std::size_t>(r.size()) != cols) parse_fail(row_where + ": ragged row");
        out.row(static_cast<Eigen::Index>(i)) = r.transpose();
    }
    return out;
}

json to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

json to_json_vector(const auto& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_fail("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelFile parse_model(const std::string& text) {
    const json doc = parse_json(text);
    ModelFile out;
    QbdBlocks& b = out.blocks;
    b.n = integer(field(doc, "n", "model"), "model.n");
    b.C = integer(field(doc, "C", "model"), "model.C");
    const json& blocks = field(doc, "blocks", "model");
    b.A_minus1 = matrix_of(field(blocks, "A_minus1", "blocks"), "blocks.A_minus1");
    b.A0 = matrix_of(field(blocks, "A0", "blocks"), "blocks.A0");
    b.A1 = matrix_of(field(blocks, "A1", "blocks"), "blocks.A1");
    b.B0 = matrix_of(field(blocks, "B0", "blocks"), "blocks.B0");
    b.C0 = matrix_of(field(blocks, "C0", "blocks"), "blocks.C0");
    if (doc.contains("reward")) {
        const json& g = field(doc.at("reward"), "g", "reward");
        if (!g.is_array()) parse_fail("reward.g: expected an array of level vectors");
        RewardSpec r;
        for (std::size_t k = 0; k < g.size(); ++k) {
            r.g.push_back(vector_of(g[k], "reward.g[" + std::to_string(k) + "]"));
        }
        out.reward = std::move(r);
    }
    return out;
}

ModelFile load_model(const std::string& path) { return parse_model(read_text_file(path)); }

std::string dump_model(const ModelFile& model) {
    const QbdBlocks& b = model.blocks;
    json doc;
    doc["n"] = b.n;
    doc["C"] = b.C;
    doc["blocks"] = {{"A_minus1", to_json(b.A_minus1)},
                     {"A0", to_json(b.A0)},
                     {"A1", to_json(b.A1)},
                     {"B0", to_json(b.B0)},
                     {"C0", to_json(b.C0)}};
    if (model.reward) {
        json g = json::array();
        for (const auto& v : model.reward->g) g.push_back(to_json_vector(v));
        doc["reward"] = {{"g", g}};
    }
    return doc.dump(2) + "\n";
}

MapPhFile parse_mapph(const std::string& text) {
    const json doc = parse_json(text);
    MapPhFile out;
    const json& map = field(doc, "map", "parameters");
    out.map.D0 = matrix_of(field(map, "D0", "map"), "map.D0");
    out.map.D1 = matrix_of(field(map, "D1", "map"), "map.D1");
    const json& ph = field(doc, "ph", "parameters");
    out.ph.tau = vector_of(field(ph, "tau", "ph"), "ph.tau").transpose();
    out.ph.T = matrix_of(field(ph, "T", "ph"), "ph.T");
    out.C = integer(field(doc, "C", "parameters"), "C");
    return out;
}

MapPhFile load_mapph(const std::string& path) { return parse_mapph(read_text_file(path)); }

std::string dump_mapph(const MapPhFile& p) {
    json doc;
    doc["map"] = {{"D0", to_json(p.map.D0)}, {"D1", to_json(p.map.D1)}};
    doc["ph"] = {{"tau", to_json_vector(p.ph.tau)}, {"T", to_json(p.ph.T)}};
    doc["C"] = p.C;
    return doc.dump(2) + "\n";
}

QbdBlocks random_model(int n, int C, std::uint64_t seed) {
    if (n < 1 || C < 1) throw Error(ErrorCategory::Parameter, "random model needs n >= 1 and C >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&](bool zero_diagonal) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) m(i, j) = (zero_diagonal && i == j) ? 0.0 : unif(rng);
        }
        return m;
    };
    QbdBlocks b;
    b.n = n;
    b.C = C;
    b.A_minus1 = draw(false);
    b.A1 = draw(false);
    b.A0 = draw(true);
    b.B0 = draw(true);
    b.C0 = draw(true);
    const Vector down = b.A_minus1.rowwise().sum();
    const Vector up = b.A1.rowwise().sum();
    b.A0.diagonal() = -(b.A0.rowwise().sum() + down + up);
    b.B0.diagonal() = -(b.B0.rowwise().sum() + up);
    b.C0.diagonal() = -(b.C0.rowwise().sum() + down);
    return b;
}

} // namespace qbdr
