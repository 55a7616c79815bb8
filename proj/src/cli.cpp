#include "pmanifold/cli.hpp"

#include "pmanifold/datasets.hpp"
#include "pmanifold/error.hpp"
#include "pmanifold/experiments.hpp"
#include "pmanifold/io.hpp"
#include "pmanifold/isomap.hpp"
#include "pmanifold/manifold.hpp"
#include "pmanifold/metrics.hpp"
#include "pmanifold/parallel.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace pmanifold::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
    std::size_t threads = 0;
    std::string config_file;

    // generate
    std::string kind;
    std::optional<std::size_t> n;
    std::optional<double> noise;
    std::size_t agents = 20;
    std::size_t steps = 2000;
    double rho = 14.0;
    double noise_sd = 0.01;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string truth;

    // fit
    std::string input;
    double p = 0.9;
    std::vector<std::size_t> nc{10, 10};
    std::size_t samples = 200;
    std::optional<double> gap_threshold;
    double gap_factor = 3.0;
    std::size_t min_subcluster = 4;
    double radius_scale = 1.0;
    std::vector<std::size_t> axes;
    std::string spread = "half_extent";
    std::optional<std::uint64_t> origin_seed;
    std::size_t exact_limit = 2000;

    // embed / invert / metric / isomap
    std::string model;
    std::string embedding;
    std::size_t k = 10;
    std::size_t dims = 2;
    std::string residuals;

    // sweep
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<double> step;
    std::string report;
};

// Appends flags from a JSON config object unless given on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            path = args[i + 1];
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot read config file " + path);
    }
    const json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object()) {
        throw InputError(path + ": config must be a JSON object");
    }
    std::vector<std::string> merged = args;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (std::find(args.begin(), args.end(), flag) != args.end()) {
            continue;
        }
        auto text = [&](const json& v) -> std::string {
            if (v.is_string()) {
                return v.get<std::string>();
            }
            if (v.is_number_float()) {
                return format_double(v.get<double>());
            }
            return v.dump();
        };
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                merged.push_back(flag);
            }
        } else if (value.is_array()) {
            merged.push_back(flag);
            for (const auto& v : value) {
                merged.push_back(text(v));
            }
        } else if (!value.is_null()) {
            merged.push_back(flag);
            merged.push_back(text(value));
        }
    }
    return merged;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::uint64_t>& v, int) { return v ? json(*v) : json(nullptr); }

SliceConfig slice_config(const Options& o) {
    if (o.nc.size() != 2) {
        throw InputError("--nc takes two slab counts");
    }
    SliceConfig s;
    s.n_c1 = o.nc[0];
    s.n_c2 = o.nc[1];
    s.min_subcluster_size = o.min_subcluster;
    s.subcluster_radius_scale = o.radius_scale;
    return s;
}

SpreadMode spread_mode(const std::string& name) {
    if (name == "half_extent") {
        return SpreadMode::HalfExtent;
    }
    if (name == "std_dev") {
        return SpreadMode::StandardDeviation;
    }
    throw InputError("unknown spread '" + name + "'");
}

std::string truth_path(const Options& o) {
    if (!o.truth.empty()) {
        return o.truth;
    }
    fs::path out(o.output);
    fs::path t = out.parent_path() / (out.stem().string() + "_truth" + out.extension().string());
    return t.string();
}

std::vector<std::vector<double>> coord_rows(const std::vector<Coord>& coords) {
    std::vector<std::vector<double>> rows;
    rows.reserve(coords.size());
    for (const Coord& c : coords) {
        rows.push_back({c[0], c[1]});
    }
    return rows;
}

std::vector<Coord> read_coords(const std::string& path) {
    const CsvTable table = read_csv(path);
    std::vector<Coord> coords;
    coords.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != 2) {
            throw InputError(path + ": row " + std::to_string(i + 1) + " has " + std::to_string(table.rows[i].size()) +
                             " values, expected 2");
        }
        coords.emplace_back(table.rows[i][0], table.rows[i][1]);
    }
    return coords;
}

int do_generate(const Options& o, std::ostream& out) {
    if (!o.seed) {
        throw InputError("generate needs --seed");
    }
    json echo = {{"subcommand", "generate"}, {"kind", o.kind}, {"seed", *o.seed}, {"output", o.output}};
    PointCloud cloud;
    std::vector<Eigen::Vector2d> truth;
    if (o.kind == "paraboloid") {
        const std::size_t n = o.n.value_or(2000);
        const double noise = o.noise.value_or(0.05);
        echo["n"] = n;
        echo["noise"] = noise;
        cloud = paraboloid(n, noise, *o.seed);
    } else if (o.kind == "swiss_roll") {
        const std::size_t n = o.n.value_or(2500);
        const double noise = o.noise.value_or(0.4);
        echo["n"] = n;
        echo["noise"] = noise;
        cloud = noisy_swiss_roll(n, noise, *o.seed);
    } else if (o.kind == "predator_mobbing") {
        echo["agents"] = o.agents;
        echo["steps"] = o.steps;
        echo["rho"] = o.rho;
        echo["noise_sd"] = o.noise_sd;
        echo["truth"] = truth_path(o);
        MobbingData data = predator_mobbing(o.agents, o.steps, o.rho, o.noise_sd, *o.seed);
        cloud = std::move(data.cloud);
        truth = std::move(data.truth);
    } else {
        throw InputError("unknown dataset kind '" + o.kind + "'");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vector p = cloud.point(i);
        rows.emplace_back(p.data(), p.data() + p.size());
    }
    write_file_atomic(o.output, format_csv(rows, std::optional<json>(echo)));
    if (!truth.empty()) {
        write_file_atomic(truth_path(o), format_csv(coord_rows(truth), std::optional<json>(echo)));
        out << "wrote ground truth to " << truth_path(o) << "\n";
    }
    out << "wrote " << cloud.size() << " points to " << o.output << "\n";
    return kExitOk;
}

int do_fit(const Options& o, std::ostream& out) {
    const PointCloud cloud = read_point_cloud(o.input);
    const SliceConfig slicing = slice_config(o);
    BuildOptions build;
    build.samples = o.samples;
    build.gap_threshold = o.gap_threshold;
    build.gap_spacing_factor = o.gap_factor;
    build.exact_geodesic_limit = o.exact_limit;
    build.spread = spread_mode(o.spread);
    build.origin_seed = o.origin_seed;
    if (!o.axes.empty()) {
        if (o.axes.size() != 2) {
            throw InputError("--axes takes two coordinate indices");
        }
        build.frame = axis_frame(cloud, o.axes[0], o.axes[1], build.spread);
    }
    const json echo = {{"subcommand", "fit"},
                       {"input", o.input},
                       {"output", o.output},
                       {"p", o.p},
                       {"nc", o.nc},
                       {"samples", o.samples},
                       {"gap_threshold", opt(o.gap_threshold)},
                       {"gap_factor", o.gap_factor},
                       {"min_subcluster", o.min_subcluster},
                       {"radius_scale", o.radius_scale},
                       {"axes", o.axes},
                       {"spread", o.spread},
                       {"origin_seed", opt(o.origin_seed, 0)},
                       {"exact_limit", o.exact_limit}};
    const PrincipalManifold m = build_manifold(cloud, o.p, slicing, build);
    save_manifold(o.output, m, echo);
    out << "fitted " << m.family1().size() << " + " << m.family2().size() << " splines, " << m.nodes().size()
        << " grid nodes; wrote " << o.output << "\n";
    return kExitOk;
}

int do_embed(const Options& o, std::ostream& out) {
    const PrincipalManifold m = load_manifold(o.model);
    const PointCloud cloud = read_point_cloud(o.input);
    if (cloud.dim() != static_cast<std::size_t>(m.frame().mu.size())) {
        throw InputError(o.input + ": points have dimension " + std::to_string(cloud.dim()) + ", model expects " +
                         std::to_string(m.frame().mu.size()));
    }
    const json echo = {{"subcommand", "embed"}, {"model", o.model}, {"input", o.input}, {"output", o.output},
                       {"columns", {"x1", "x2"}}};
    const auto coords = m.embed(cloud);
    write_file_atomic(o.output, format_csv(coord_rows(coords), std::optional<json>(echo)));
    out << "embedded " << coords.size() << " points into " << o.output << "\n";
    return kExitOk;
}

int do_invert(const Options& o, std::ostream& out) {
    const PrincipalManifold m = load_manifold(o.model);
    const auto coords = read_coords(o.input);
    std::vector<std::vector<double>> rows(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const Vector y = m.invert(coords[i]);
        rows[i].assign(y.data(), y.data() + y.size());
    }
    const json echo = {{"subcommand", "invert"}, {"model", o.model}, {"input", o.input}, {"output", o.output}};
    write_file_atomic(o.output, format_csv(rows, std::optional<json>(echo)));
    out << "inverted " << rows.size() << " points into " << o.output << "\n";
    return kExitOk;
}

int do_metric(const Options& o, std::ostream& out) {
    const PointCloud cloud = read_point_cloud(o.input);
    const auto coords = read_coords(o.embedding);
    json result = {{"run",
                    {{"subcommand", "metric"},
                     {"input", o.input},
                     {"embedding", o.embedding},
                     {"truth", o.truth},
                     {"k", o.k},
                     {"output", o.output}}}};
    const AdjacencyDistance a = adjacency_distance(cloud, o.k);
    const double d = embedding_delta(cloud, coords, o.k);
    result["delta"] = d;
    result["mean_knn_distance"] = mean_knn_distance(a);
    if (!o.truth.empty()) {
        const CorrelationScore s = correlation_score(coords, read_coords(o.truth));
        result["correlation"] = {{"r_total", s.r_total}, {"r", s.r}, {"p_values", s.p_values}};
    }
    if (!o.output.empty()) {
        write_file_atomic(o.output, result.dump(1) + "\n");
    }
    out << "delta " << format_double(d) << "\n";
    if (result.contains("correlation")) {
        out << "r_total " << format_double(result["correlation"]["r_total"].get<double>()) << "\n";
    }
    return kExitOk;
}

int do_isomap(const Options& o, std::ostream& out) {
    const PointCloud cloud = read_point_cloud(o.input);
    const IsomapResult r = isomap(cloud, o.k, o.dims);
    json echo = {{"subcommand", "isomap"}, {"input", o.input}, {"k", o.k},          {"dims", o.dims},
                 {"output", o.output},    {"residuals", o.residuals}, {"dropped", r.dropped}};
    std::vector<std::vector<double>> rows(r.embedding.rows());
    for (Eigen::Index i = 0; i < r.embedding.rows(); ++i) {
        rows[static_cast<std::size_t>(i)].assign(r.embedding.row(i).data(),
                                                 r.embedding.row(i).data() + r.embedding.cols());
    }
    write_file_atomic(o.output, format_csv(rows, std::optional<json>(echo)));
    if (!o.residuals.empty()) {
        std::vector<std::vector<double>> rv;
        for (std::size_t e = 0; e < r.residual_variances.size(); ++e) {
            rv.push_back({static_cast<double>(e + 1), r.residual_variances[e]});
        }
        write_file_atomic(o.residuals, format_csv(rv, std::optional<json>(echo)));
    }
    if (r.dropped > 0) {
        out << "warning: dropped " << r.dropped << " points outside the largest neighbourhood component\n";
    }
    out << "isomap embedded " << r.kept.size() << " points into " << o.output << "\n";
    return kExitOk;
}

int do_sweep(const Options& o, std::ostream& out) {
    if (!o.seed) {
        throw InputError("sweep needs --seed");
    }
    SweepConfig c = default_sweep(sweep_kind_from_string(o.kind));
    c.seed = *o.seed;
    if (o.start) c.start = *o.start;
    if (o.stop) c.stop = *o.stop;
    if (o.step) c.step = *o.step;
    if (o.n) c.n = *o.n;
    if (o.noise) c.noise = *o.noise;
    c.p = o.p;
    c.slicing = slice_config(o);
    c.metric_k = o.k;
    if (!o.axes.empty() && o.axes.size() != 2) {
        throw InputError("--axes takes two coordinate indices");
    }
    c.axes = o.axes;
    c.build.samples = o.samples;
    c.build.gap_threshold = o.gap_threshold;
    c.build.gap_spacing_factor = o.gap_factor;
    const json echo = {{"subcommand", "sweep"},
                       {"kind", o.kind},
                       {"seed", c.seed},
                       {"start", c.start},
                       {"stop", c.stop},
                       {"step", c.step},
                       {"n", c.n},
                       {"noise", c.noise},
                       {"p", c.p},
                       {"nc", o.nc},
                       {"axes", o.axes},
                       {"k", c.metric_k},
                       {"samples", c.build.samples},
                       {"gap_threshold", opt(c.build.gap_threshold)},
                       {"gap_factor", c.build.gap_spacing_factor},
                       {"columns", {to_string(c.kind), "delta"}}};
    const SweepResult r = run_sweep(c);
    std::vector<std::vector<double>> rows;
    for (const SweepPoint& pt : r.points) {
        rows.push_back({pt.value, pt.delta});
    }
    write_file_atomic(o.output, format_csv(rows, std::optional<json>(echo)));
    json report = {{"run", echo}, {"fit", nullptr}};
    if (r.fit) {
        report["fit"] = {{"kind", to_string(r.fit->kind)}, {"parameters", r.fit->parameters},
                         {"r_squared", r.fit->r_squared}};
    }
    json failures = json::array();
    for (const SweepPoint& pt : r.points) {
        if (!pt.error.empty()) {
            failures.push_back({{"value", pt.value}, {"error", pt.error}});
        }
    }
    report["failures"] = failures;
    if (!o.report.empty()) {
        write_file_atomic(o.report, report.dump(1) + "\n");
    }
    if (r.fit) {
        out << to_string(r.fit->kind) << " fit R^2 " << format_double(r.fit->r_squared) << " over "
            << r.points.size() << " sweep values\n";
    } else {
        out << "no trend fit: too few usable sweep values\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Principal manifold toolkit: slicing, smoothing splines and arc-length embedding", "pmanifold"};
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    app.add_option("--config", o.config_file, "JSON object of flag values; command-line flags win");

    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
    gen->add_option("--kind", o.kind, "paraboloid | swiss_roll | predator_mobbing")
        ->required()
        ->check(CLI::IsMember({"paraboloid", "swiss_roll", "predator_mobbing"}));
    gen->add_option("--n", o.n, "Point count");
    gen->add_option("--noise", o.noise, "Uniform noise amplitude");
    gen->add_option("--agents", o.agents, "Predator mobbing: agent count")->capture_default_str();
    gen->add_option("--steps", o.steps, "Predator mobbing: time steps")->capture_default_str();
    gen->add_option("--rho", o.rho, "Predator mobbing: revolutions")->capture_default_str();
    gen->add_option("--noise-sd", o.noise_sd, "Predator mobbing: Gaussian noise deviation")->capture_default_str();
    gen->add_option("--seed", o.seed, "Random seed")->required();
    gen->add_option("--output,-o", o.output, "Output CSV")->required();
    gen->add_option("--truth", o.truth, "Ground-truth CSV for predator mobbing");

    auto add_build_flags = [&](CLI::App* sub) {
        sub->add_option("--p", o.p, "Smoothing parameter in [0, 1]")->capture_default_str();
        sub->add_option("--nc", o.nc, "Slab counts along the two reference axes")->expected(2)->capture_default_str();
        sub->add_option("--samples", o.samples, "Parameter mesh per spline for intersections")->capture_default_str();
        sub->add_option("--gap-threshold", o.gap_threshold, "Largest closest-approach distance kept as a node");
        sub->add_option("--gap-factor", o.gap_factor, "Default threshold = factor x median node spacing")
            ->capture_default_str();
        sub->add_option("--min-subcluster", o.min_subcluster, "Smallest sub-cluster kept")->capture_default_str();
        sub->add_option("--radius-scale", o.radius_scale, "Sub-cluster range radius in slab widths")
            ->capture_default_str();
    };

    auto* fit = app.add_subcommand("fit", "Fit a principal manifold to a CSV point cloud");
    fit->add_option("--input,-i", o.input, "Point cloud CSV")->required();
    fit->add_option("--output,-o", o.output, "Manifold JSON")->required();
    add_build_flags(fit);
    fit->add_option("--axes", o.axes, "Use coordinate axes i j (0-based) instead of principal directions")
        ->expected(2);
    fit->add_option("--spread", o.spread, "half_extent | std_dev")->capture_default_str();
    fit->add_option("--origin-seed", o.origin_seed, "Pick the origin node at random with this seed");
    fit->add_option("--exact-limit", o.exact_limit, "Largest cluster solved with exact all-pairs geodesics")
        ->capture_default_str();

    auto* emb = app.add_subcommand("embed", "Map points to 2-D manifold coordinates");
    emb->add_option("--model,-m", o.model, "Manifold JSON")->required();
    emb->add_option("--input,-i", o.input, "Point cloud CSV")->required();
    emb->add_option("--output,-o", o.output, "Embedding CSV")->required();

    auto* inv = app.add_subcommand("invert", "Map 2-D coordinates back to ambient space");
    inv->add_option("--model,-m", o.model, "Manifold JSON")->required();
    inv->add_option("--input,-i", o.input, "Embedding CSV (x1, x2 per row)")->required();
    inv->add_option("--output,-o", o.output, "Point CSV")->required();

    auto* met = app.add_subcommand("metric", "Adjacency-distance error and ground-truth correlation");
    met->add_option("--input,-i", o.input, "Original point cloud CSV")->required();
    met->add_option("--embedding,-e", o.embedding, "Embedding CSV")->required();
    met->add_option("--truth", o.truth, "Ground-truth CSV (2 columns)");
    met->add_option("--k", o.k, "Neighbours per point")->capture_default_str();
    met->add_option("--output,-o", o.output, "Metrics JSON");

    auto* iso = app.add_subcommand("isomap", "Isomap baseline embedding");
    iso->add_option("--input,-i", o.input, "Point cloud CSV")->required();
    iso->add_option("--k", o.k, "Neighbours per point")->capture_default_str();
    iso->add_option("--dims", o.dims, "Embedding dimensions")->capture_default_str();
    iso->add_option("--output,-o", o.output, "Embedding CSV")->required();
    iso->add_option("--residuals", o.residuals, "Residual-variance CSV");

    auto* sw = app.add_subcommand("sweep", "Delta sweeps over smoothing, noise or sample size");
    sw->add_option("--kind", o.kind, "p | noise | n")->required()->check(CLI::IsMember({"p", "noise", "n"}));
    sw->add_option("--seed", o.seed, "Random seed")->required();
    sw->add_option("--start", o.start, "First sweep value");
    sw->add_option("--stop", o.stop, "Last sweep value");
    sw->add_option("--step", o.step, "Sweep increment");
    sw->add_option("--n", o.n, "Roll size");
    sw->add_option("--noise", o.noise, "Fixed noise for p and n sweeps");
    sw->add_option("--k", o.k, "Metric neighbours")->capture_default_str();
    add_build_flags(sw);
    sw->add_option("--axes", o.axes, "Use coordinate axes i j (0-based) instead of principal directions")
        ->expected(2);
    sw->add_option("--output,-o", o.output, "Sweep CSV")->required();
    sw->add_option("--report", o.report, "Fit report JSON");

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        set_thread_count(o.threads);
        if (o.kind.empty() && sw->parsed()) {
            o.kind = "p";
        }
        if (sw->parsed() && !fit->parsed()) {
            // Sweeps default to 15 slabs per axis unless --nc was given.
            if (sw->count("--nc") == 0) {
                o.nc = {15, 15};
            }
        }
        if (gen->parsed()) return do_generate(o, out);
        if (fit->parsed()) return do_fit(o, out);
        if (emb->parsed()) return do_embed(o, out);
        if (inv->parsed()) return do_invert(o, out);
        if (met->parsed()) return do_metric(o, out);
        if (iso->parsed()) return do_isomap(o, out);
        if (sw->parsed()) return do_sweep(o, out);
        err << "error: no subcommand\n";
        return kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const AlgorithmError& e) {
        err << "error: " << e.what() << "\n";
        return kExitAlgorithm;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitAlgorithm;
    }
}

}  // namespace pmanifold::cli
