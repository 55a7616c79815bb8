#include "pmanifold/io.hpp"

#include "pmanifold/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace pmanifold {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            throw InputError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InputError("cannot move output into place at " + path.string());
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '#') {
            if (!first_content) {
                throw InputError(source + ":" + std::to_string(line_no) + ": header row must come first");
            }
            first_content = false;
            const json parsed = json::parse(t.substr(1), nullptr, false);
            if (!parsed.is_discarded()) {
                table.header = parsed;
            }
            continue;
        }
        first_content = false;
        std::vector<double> row;
        std::size_t pos = 0;
        while (true) {
            const auto comma = t.find(',', pos);
            const std::string field = trim(t.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
            double value = 0.0;
            const char* begin = field.data();
            const char* end = field.data() + field.size();
            if (!field.empty() && *begin == '+') {
                ++begin;
            }
            const auto res = std::from_chars(begin, end, value);
            if (field.empty() || res.ec != std::errc() || res.ptr != end) {
                throw InputError(source + ":" + std::to_string(line_no) + ": '" + field + "' is not a number");
            }
            row.push_back(value);
            if (comma == std::string::npos) {
                break;
            }
            pos = comma + 1;
        }
        if (!table.rows.empty() && row.size() != table.rows.front().size()) {
            throw InputError(source + ":" + std::to_string(line_no) + ": row has " + std::to_string(row.size()) +
                             " values, expected " + std::to_string(table.rows.front().size()));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

PointCloud read_point_cloud(const fs::path& path) {
    const CsvTable table = read_csv(path);
    return PointCloud::from_rows(table.rows);
}

std::string format_csv(const std::vector<std::vector<double>>& rows, const std::optional<json>& header) {
    std::string out;
    if (header) {
        out += "# " + header->dump() + "\n";
    }
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out += ',';
            }
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

namespace {

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string spread_name(SpreadMode mode) { return mode == SpreadMode::HalfExtent ? "half_extent" : "std_dev"; }

SpreadMode spread_from(const std::string& name) {
    if (name == "half_extent") {
        return SpreadMode::HalfExtent;
    }
    if (name == "std_dev") {
        return SpreadMode::StandardDeviation;
    }
    throw InputError("unknown spread mode '" + name + "'");
}

}  // namespace

json to_json(const SmoothingSpline& spline) {
    json coeffs = json::array();
    for (const auto& block : spline.coefficients()) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            rows.push_back({block(r, 0), block(r, 1), block(r, 2), block(r, 3)});
        }
        coeffs.push_back(std::move(rows));
    }
    return {{"p", spline.smoothing()}, {"knots", spline.knots()}, {"coefficients", std::move(coeffs)}};
}

SmoothingSpline spline_from_json(const json& j) {
    std::vector<SmoothingSpline::IntervalCoefficients> blocks;
    for (const auto& rows : j.at("coefficients")) {
        SmoothingSpline::IntervalCoefficients block(static_cast<Eigen::Index>(rows.size()), 4);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto c = rows[r].get<std::vector<double>>();
            if (c.size() != 4) {
                throw InputError("spline coefficient rows need 4 values");
            }
            for (int k = 0; k < 4; ++k) {
                block(static_cast<Eigen::Index>(r), k) = c[static_cast<std::size_t>(k)];
            }
        }
        blocks.push_back(std::move(block));
    }
    return SmoothingSpline(j.at("knots").get<std::vector<double>>(), std::move(blocks), j.at("p").get<double>());
}

json to_json(const PrincipalManifold& m) {
    const ManifoldConfig& c = m.config();
    json config = {{"p", c.p},
                   {"n_c1", c.slicing.n_c1},
                   {"n_c2", c.slicing.n_c2},
                   {"min_subcluster_size", c.slicing.min_subcluster_size},
                   {"subcluster_radius_scale", c.slicing.subcluster_radius_scale},
                   {"samples", c.samples},
                   {"gap_threshold", c.gap_threshold},
                   {"spread", spread_name(c.spread)},
                   {"origin_seed", c.origin_seed ? json(*c.origin_seed) : json(nullptr)}};
    const ReferenceFrame& f = m.frame();
    json frame = {{"mu", vector_json(f.mu)},         {"v1", vector_json(f.v1)},         {"v2", vector_json(f.v2)},
                  {"sigma1", f.sigma1},              {"sigma2", f.sigma2},              {"q1", vector_json(f.q1)},
                  {"q2", vector_json(f.q2)}};
    auto family = [](const std::vector<SmoothingSpline>& splines, const std::vector<SplineSource>& sources) {
        json out = json::array();
        for (std::size_t i = 0; i < splines.size(); ++i) {
            json s = to_json(splines[i]);
            s["slab"] = sources[i].slab;
            s["subcluster"] = sources[i].subcluster;
            s["members"] = sources[i].members;
            s["geodesic_points"] = sources[i].geodesic_points;
            out.push_back(std::move(s));
        }
        return out;
    };
    json nodes = json::array();
    for (const GridNode& n : m.nodes()) {
        nodes.push_back({{"l", n.l},
                         {"m", n.m},
                         {"t", vector_json(n.t)},
                         {"lambda1", n.lambda1},
                         {"lambda2", n.lambda2},
                         {"gap", n.gap},
                         {"coord", {n.coord[0], n.coord[1]}}});
    }
    const GridNode& o = m.origin();
    return {{"format", "pmanifold-model"},
            {"version", 1},
            {"config", std::move(config)},
            {"frame", std::move(frame)},
            {"splines1", family(m.family1(), m.sources1())},
            {"splines2", family(m.family2(), m.sources2())},
            {"nodes", std::move(nodes)},
            {"origin", {{"l", o.l}, {"m", o.m}}}};
}

PrincipalManifold manifold_from_json(const json& j) {
    try {
        if (j.value("format", "") != "pmanifold-model") {
            throw InputError("not a manifold model file");
        }
        const json& c = j.at("config");
        ManifoldConfig config;
        config.p = c.at("p").get<double>();
        config.slicing.n_c1 = c.at("n_c1").get<std::size_t>();
        config.slicing.n_c2 = c.at("n_c2").get<std::size_t>();
        config.slicing.min_subcluster_size = c.at("min_subcluster_size").get<std::size_t>();
        config.slicing.subcluster_radius_scale = c.at("subcluster_radius_scale").get<double>();
        config.samples = c.at("samples").get<std::size_t>();
        config.gap_threshold = c.at("gap_threshold").get<double>();
        config.spread = spread_from(c.at("spread").get<std::string>());
        if (!c.at("origin_seed").is_null()) {
            config.origin_seed = c.at("origin_seed").get<std::uint64_t>();
        }
        const json& fj = j.at("frame");
        ReferenceFrame frame;
        frame.mu = vector_from(fj.at("mu"));
        frame.v1 = vector_from(fj.at("v1"));
        frame.v2 = vector_from(fj.at("v2"));
        frame.sigma1 = fj.at("sigma1").get<double>();
        frame.sigma2 = fj.at("sigma2").get<double>();
        frame.q1 = vector_from(fj.at("q1"));
        frame.q2 = vector_from(fj.at("q2"));
        auto family = [](const json& arr, std::vector<SmoothingSpline>& splines, std::vector<SplineSource>& sources) {
            for (const auto& s : arr) {
                splines.push_back(spline_from_json(s));
                sources.push_back(SplineSource{s.at("slab").get<std::size_t>(), s.at("subcluster").get<std::size_t>(),
                                               s.at("members").get<std::size_t>(),
                                               s.at("geodesic_points").get<std::size_t>()});
            }
        };
        std::vector<SmoothingSpline> f1;
        std::vector<SmoothingSpline> f2;
        std::vector<SplineSource> s1;
        std::vector<SplineSource> s2;
        family(j.at("splines1"), f1, s1);
        family(j.at("splines2"), f2, s2);
        std::vector<GridNode> nodes;
        std::optional<std::size_t> origin;
        const std::size_t ol = j.at("origin").at("l").get<std::size_t>();
        const std::size_t om = j.at("origin").at("m").get<std::size_t>();
        for (const auto& nj : j.at("nodes")) {
            GridNode n;
            n.l = nj.at("l").get<std::size_t>();
            n.m = nj.at("m").get<std::size_t>();
            n.t = vector_from(nj.at("t"));
            n.lambda1 = nj.at("lambda1").get<double>();
            n.lambda2 = nj.at("lambda2").get<double>();
            n.gap = nj.at("gap").get<double>();
            const auto coord = nj.at("coord").get<std::vector<double>>();
            if (coord.size() != 2) {
                throw InputError("node coord must have 2 values");
            }
            n.coord = Coord(coord[0], coord[1]);
            if (n.l == ol && n.m == om) {
                origin = nodes.size();
            }
            nodes.push_back(std::move(n));
        }
        if (!origin) {
            throw InputError("origin node missing from grid");
        }
        return PrincipalManifold(std::move(config), std::move(frame), std::move(f1), std::move(f2), std::move(s1),
                                 std::move(s2), std::move(nodes), *origin);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed manifold model: ") + e.what());
    }
}

void save_manifold(const fs::path& path, const PrincipalManifold& manifold, const json& run_config) {
    json j = to_json(manifold);
    j["run"] = run_config;
    write_file_atomic(path, j.dump(1) + "\n");
}

PrincipalManifold load_manifold(const fs::path& path) {
    const json j = json::parse(read_text(path), nullptr, false);
    if (j.is_discarded()) {
        throw InputError(path.string() + ": not valid JSON");
    }
    return manifold_from_json(j);
}

}  // namespace pmanifold
