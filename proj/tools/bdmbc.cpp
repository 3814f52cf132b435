// Command-line front end: gen, cluster, grid, bench, eval.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bdmbc.hpp"

namespace {

enum ExitCode { ok = 0, usage = 2, io = 3, internal = 4 };

struct DataOptions {
    std::string path;
    bool header = false;
    std::optional<int> label_col;
    bool scale = false;
};

struct ConfigOptions {
    std::size_t b = 10;
    double rho = 0.1;
    std::optional<std::size_t> s;
    std::optional<std::size_t> kd, kl;
    std::size_t kg = 15;
    double lambda = 0.5;
    std::optional<std::size_t> min_cluster_size;
    std::uint64_t seed = 0;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("data", d.path, "Input CSV")->required();
    cmd->add_flag("--header", d.header, "First row is a header (otherwise detected)");
    cmd->add_option("--label-col", d.label_col, "Column holding labels (negative counts from the end); a header column named label is used by default");
    cmd->add_flag("--scale", d.scale, "Min-max scale every feature to [0, 1]");
}

void add_config_options(CLI::App* cmd, ConfigOptions& c, bool require_k) {
    cmd->add_option("--b", c.b, "Bagging rounds B")->capture_default_str();
    cmd->add_option("--rho", c.rho, "Subsample ratio, s = ceil(rho n)")->capture_default_str();
    cmd->add_option("--s", c.s, "Explicit subsample size (overrides --rho)");
    auto* kd = cmd->add_option("--kd", c.kd, "k_D, neighbor rank of the bagged distance");
    auto* kl = cmd->add_option("--kl", c.kl, "k_L, neighborhood size of the level-set score");
    if (require_k) {
        kd->required();
        kl->required();
    }
    cmd->add_option("--kg", c.kg, "k_G, degree of the neighbor graph")->capture_default_str();
    cmd->add_option("--lambda", c.lambda, "Core threshold in [0, 1]")->capture_default_str();
    cmd->add_option("--min-cluster-size", c.min_cluster_size, "Dissolve smaller clusters (default 2 k_G)");
    cmd->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
}

bdmbc::BdmbcConfig to_config(const ConfigOptions& o) {
    bdmbc::BdmbcConfig c;
    c.rounds = o.b;
    c.rho = o.rho;
    c.subsample_size = o.s;
    c.k_D = o.kd.value_or(0);
    c.k_L = o.kl.value_or(0);
    c.k_G = o.kg;
    c.lambda = o.lambda;
    c.min_cluster_size = o.min_cluster_size;
    c.seed = o.seed;
    return c;
}

// Cells of the first non-blank row when it holds any non-numeric cell.
std::optional<std::vector<std::string>> header_cells(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bdmbc::IoError("cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (bdmbc::detail::trim(line).empty()) continue;
        const auto cells = bdmbc::detail::split_commas(line);
        if (std::all_of(cells.begin(), cells.end(), [](auto c) { return bdmbc::detail::parse_real(c).has_value(); }))
            return std::nullopt;
        return std::vector<std::string>(cells.begin(), cells.end());
    }
    return std::nullopt;
}

bdmbc::Dataset load(const DataOptions& d) {
    const auto header = header_cells(d.path);
    auto label_col = d.label_col;
    if (!label_col && header) {
        for (std::size_t c = 0; c < header->size(); ++c) {
            std::string name((*header)[c]);
            std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
            if (name == "label") label_col = static_cast<int>(c);
        }
    }
    const auto ds = bdmbc::load_csv(d.path, d.header || header.has_value(), label_col);
    return d.scale ? bdmbc::scale_minmax(ds) : ds;
}

nlohmann::json read_json_arg(const std::string& arg) {
    std::string text = arg;
    if (arg.empty() || arg.front() != '{') {
        std::ifstream in(arg);
        if (!in) throw bdmbc::IoError("cannot open '" + arg + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw bdmbc::ParameterError("json", std::string("invalid JSON: ") + e.what());
    }
}

std::string sibling_csv(const std::string& json_path) {
    std::filesystem::path p(json_path);
    p.replace_extension(".csv");
    return p.string();
}

int cmd_gen(const std::string& spec_arg, const std::string& out) {
    const auto ds = bdmbc::generate_from_spec(read_json_arg(spec_arg));
    bdmbc::write_dataset_csv(out, ds);
    std::size_t classes = 0;
    for (int l : ds.labels()) classes = std::max(classes, static_cast<std::size_t>(l) + 1);
    std::printf("n=%zu d=%zu classes=%zu -> %s\n", ds.size(), ds.dim(), classes, out.c_str());
    return ok;
}

int cmd_cluster(const DataOptions& data, const ConfigOptions& opts, const std::string& out,
                const std::string& csv_out) {
    const auto ds = load(data);
    const auto config = to_config(opts);
    const auto r = bdmbc::bdmbc_fit(ds, config);
    bdmbc::write_json(out, bdmbc::result_json(r));
    bdmbc::write_result_csv(csv_out.empty() ? sibling_csv(out) : csv_out, r);

    const auto& t = r.timings;
    const std::size_t n = ds.size();
    const bool degenerate = config.rounds == 1 && (n == 1 || config.resolved_subsample(n) == n);
    std::printf("clusters=%zu modes=%zu core=%zu/%zu path=%s\n", r.num_clusters, r.modes.size(),
                static_cast<std::size_t>(std::count(r.core_mask.begin(), r.core_mask.end(), 1)), n,
                degenerate ? "dmbc" : "bagged");
    std::printf("stage seconds: index=%.4f bagged_k_distance=%.4f neighbors=%.4f plls=%.4f graph=%.4f "
                "components=%.4f backfill=%.4f total=%.4f\n",
                t.index, t.bagged_k_distance, t.neighbors, t.plls, t.graph, t.components, t.backfill, t.total());
    if (ds.has_labels()) std::fputs(bdmbc::metrics_table(bdmbc::evaluate(ds.labels(), r.labels)).c_str(), stdout);
    return ok;
}

int cmd_grid(DataOptions data, const std::string& grid_arg, const std::string& out) {
    if (!data.label_col) data.label_col = -1;
    const auto ds = load(data);
    const auto spec = bdmbc::parse_grid_spec(read_json_arg(grid_arg));
    const auto g = bdmbc::run_grid(ds, spec);
    bdmbc::write_text(out, bdmbc::grid_csv(g));
    std::printf("cells=%zu evaluated=%zu skipped=%zu -> %s\n", spec.cells(), g.rows.size(), g.skipped, out.c_str());
    if (!g.rows.empty()) {
        const auto& best = g.rows.front();
        const auto& c = best.config;
        std::printf("best: b=%zu rho=%s kd=%zu kl=%zu kg=%zu lambda=%s clusters=%zu\n", c.rounds,
                    bdmbc::format_real(c.rho).c_str(), c.k_D, c.k_L, c.k_G, bdmbc::format_real(c.lambda).c_str(),
                    best.num_clusters);
        std::fputs(bdmbc::metrics_table(best.metrics, "best").c_str(), stdout);
    }
    return ok;
}

bdmbc::BdmbcConfig merge_arm(bdmbc::BdmbcConfig c, const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw bdmbc::ParameterError("arm", "arm override must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "b") c.rounds = value.get<std::size_t>();
            else if (key == "rho") { c.rho = value.get<double>(); c.subsample_size.reset(); }
            else if (key == "s") c.subsample_size = value.get<std::size_t>();
            else if (key == "kd") c.k_D = value.get<std::size_t>();
            else if (key == "kl") c.k_L = value.get<std::size_t>();
            else if (key == "kg") c.k_G = value.get<std::size_t>();
            else if (key == "lambda") c.lambda = value.get<double>();
            else if (key == "min_cluster_size") c.min_cluster_size = value.get<std::size_t>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else throw bdmbc::ParameterError(key, "unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw bdmbc::ParameterError("arm", std::string("malformed arm override: ") + e.what());
    }
    return c;
}

int cmd_bench(const DataOptions& data, const ConfigOptions& opts, const std::string& arm_a, const std::string& arm_b,
              const std::string& out) {
    const auto ds = load(data);
    const auto base = to_config(opts);
    const auto a = merge_arm(base, read_json_arg(arm_a));
    const auto b = merge_arm(base, read_json_arg(arm_b));
    const auto report = bdmbc::run_bench(ds, a, b, "A", "B");
    std::fputs(bdmbc::bench_table(report).c_str(), stdout);
    if (!out.empty()) bdmbc::write_json(out, bdmbc::bench_json(report, ds.size()));
    return ok;
}

int cmd_eval(const std::string& truth_path, const std::string& pred_path, int truth_col, int pred_col,
             const std::string& out) {
    const auto truth = bdmbc::load_labels(truth_path, truth_col);
    const auto pred = bdmbc::load_labels(pred_path, pred_col);
    const auto m = bdmbc::evaluate(truth, pred);
    const auto text = bdmbc::metrics_json(m).dump(2) + "\n";
    if (out.empty())
        std::fputs(text.c_str(), stdout);
    else
        bdmbc::write_text(out, text);
    std::fputs(bdmbc::metrics_table(m).c_str(), stderr);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bagged k-distance mode-based clustering"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    std::string gen_spec, gen_out;
    gen->add_option("--spec", gen_spec, "Generator JSON (inline or file)")->required();
    gen->add_option("--out", gen_out, "Output CSV")->required();

    auto* cluster = app.add_subcommand("cluster", "Cluster a dataset");
    DataOptions cluster_data;
    ConfigOptions cluster_cfg;
    std::string cluster_out, cluster_csv;
    add_data_options(cluster, cluster_data);
    add_config_options(cluster, cluster_cfg, true);
    cluster->add_option("--out", cluster_out, "Result JSON")->required();
    cluster->add_option("--csv", cluster_csv, "Per-point CSV (default: --out with .csv)");

    auto* grid = app.add_subcommand("grid", "Grid search against ground-truth labels");
    DataOptions grid_data;
    std::string grid_spec, grid_out;
    add_data_options(grid, grid_data);
    grid->add_option("--grid", grid_spec, "Grid JSON (inline or file)")->required();
    grid->add_option("--out", grid_out, "Ranked CSV")->required();

    auto* bench = app.add_subcommand("bench", "Compare two configurations stage by stage");
    DataOptions bench_data;
    ConfigOptions bench_cfg;
    std::string arm_a = R"({"b": 1, "rho": 1.0})", arm_b = "{}", bench_out;
    add_data_options(bench, bench_data);
    add_config_options(bench, bench_cfg, true);
    bench->add_option("--arm-a", arm_a, "JSON overrides for arm A")->capture_default_str();
    bench->add_option("--arm-b", arm_b, "JSON overrides for arm B")->capture_default_str();
    bench->add_option("--out", bench_out, "Report JSON");

    auto* eval = app.add_subcommand("eval", "Score predicted labels against true labels");
    std::string truth_path, pred_path, eval_out;
    int truth_col = -1, pred_col = -1;
    eval->add_option("truth", truth_path, "True labels")->required();
    eval->add_option("pred", pred_path, "Predicted labels")->required();
    eval->add_option("--truth-col", truth_col, "Label column in the truth file")->capture_default_str();
    eval->add_option("--pred-col", pred_col, "Label column in the prediction file")->capture_default_str();
    eval->add_option("--out", eval_out, "Metric JSON (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*gen) return cmd_gen(gen_spec, gen_out);
        if (*cluster) return cmd_cluster(cluster_data, cluster_cfg, cluster_out, cluster_csv);
        if (*grid) return cmd_grid(grid_data, grid_spec, grid_out);
        if (*bench) return cmd_bench(bench_data, bench_cfg, arm_a, arm_b, bench_out);
        if (*eval) return cmd_eval(truth_path, pred_path, truth_col, pred_col, eval_out);
    } catch (const bdmbc::ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const bdmbc::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const bdmbc::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io;
    } catch (const bdmbc::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal;
    }
    return internal;
}
