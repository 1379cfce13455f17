#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/metrics_csv.hpp"
#include "wat/data_io.hpp"
#include "wat/driver.hpp"

namespace wat::cli {
namespace {

using nlohmann::json;

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        parts.push_back(trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

std::vector<Example> load_dataset(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) {
        throw UsageError("dataset file '" + path + "' not found");
    }
    return read_libsvm_file(path);
}

// ---------------------------------------------------------------- run / sweep

struct TrialOptions {
    std::string dataset;
    std::size_t dim = 0;
    double train_fraction = 0.7;
    std::string algo = "pac";
    Hyperparams hyper;
    bool wrs = false;
    std::size_t k = 64;
    std::string weighting = "standard";
    std::string averaging = "simple";
    bool voting_zero = false;
    std::string baseline = "none";
    double gamma = 0.9;
    std::string seeds = "1,2,3,4,5";
    std::size_t checkpoints = 200;
    std::size_t test_subsample = 0;
    std::size_t jobs = 0;
};

void add_trial_options(CLI::App* cmd, TrialOptions& o, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON file of flag values; command-line flags override it");
    cmd->add_option("--dataset", o.dataset, "LIBSVM file")->required();
    cmd->add_option("--dim", o.dim, "declared feature dimension (0: largest index + 1)");
    cmd->add_option("--train-fraction", o.train_fraction, "fraction of each shuffle used as the training stream")
        ->capture_default_str();
    cmd->add_option("--algo", o.algo, "pac (PA-II), pa1, fsol, sgdm, adagrad, tgd")->capture_default_str();
    cmd->add_option("--c-err", o.hyper.c_err, "PA aggressiveness C")->capture_default_str();
    cmd->add_option("--eta", o.hyper.eta, "FSOL learning rate")->capture_default_str();
    cmd->add_option("--lambda", o.hyper.lambda, "FSOL sparsity parameter")->capture_default_str();
    cmd->add_option("--rate", o.hyper.rate, "step size for sgdm, adagrad, tgd")->capture_default_str();
    cmd->add_option("--momentum", o.hyper.momentum, "sgdm momentum")->capture_default_str();
    cmd->add_option("--gravity", o.hyper.gravity, "tgd shrinkage gravity")->capture_default_str();
    cmd->add_option("--period", o.hyper.period, "tgd truncation period")->capture_default_str();
    cmd->add_option("--seeds", o.seeds, "trial seeds, e.g. 1,2,3 or 1-5")->capture_default_str();
    cmd->add_option("--checkpoints", o.checkpoints, "target number of evaluation checkpoints")
        ->capture_default_str();
    cmd->add_option("--test-subsample", o.test_subsample, "evaluate on the first N test examples (0: all)");
    cmd->add_option("--jobs", o.jobs, "worker threads (0: hardware threads)");
}

void add_ensemble_options(CLI::App* cmd, TrialOptions& o) {
    cmd->add_flag("--wrs", o.wrs, "attach the weighted reservoir ensemble");
    cmd->add_option("--k", o.k, "reservoir size, top-K size, or moving-average window")->capture_default_str();
    cmd->add_option("--weighting", o.weighting, "standard or exponential")->capture_default_str();
    cmd->add_option("--averaging", o.averaging, "simple or weighted")->capture_default_str();
    cmd->add_flag("--voting-zero", o.voting_zero, "zero coordinates that are zero in more than half the members");
    cmd->add_option("--baseline", o.baseline, "none, topk, movavg, expavg")->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "expavg smoothing factor in (0, 1]")->capture_default_str();
}

RunConfig build_config(const TrialOptions& o) {
    RunConfig c;
    const auto algo = parse_algorithm(o.algo);
    if (!algo) throw UsageError("unknown --algo '" + o.algo + "'");
    const auto weighting = parse_weighting(o.weighting);
    if (!weighting) throw UsageError("unknown --weighting '" + o.weighting + "'");
    const auto averaging = parse_averaging(o.averaging);
    if (!averaging) throw UsageError("unknown --averaging '" + o.averaging + "'");
    const auto baseline = parse_baseline(o.baseline);
    if (!baseline) throw UsageError("unknown --baseline '" + o.baseline + "'");
    if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) {
        throw UsageError("--train-fraction must lie in (0, 1)");
    }

    c.algorithm = *algo;
    c.hyper = o.hyper;
    c.wrs = o.wrs;
    c.reservoir_size = o.k;
    c.weighting = *weighting;
    c.averaging = *averaging;
    c.voting_zero = o.voting_zero;
    c.baseline = *baseline;
    c.gamma = o.gamma;
    c.checkpoints = o.checkpoints;
    c.dimension = o.dim;
    c.test_subsample = o.test_subsample;
    try {
        validate(c);
        validate(c.algorithm, c.hyper);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

double curve_rop(const AccuracyCurve& curve) { return rop(oracle_curve(curve), curve); }

int cmd_run(const TrialOptions& o, const std::string& out_path, const std::string& json_path,
            const std::string& summary_path, std::ostream& out) {
    const RunConfig base_config = build_config(o);
    const auto seeds = parse_seed_list(o.seeds);
    const auto data = load_dataset(o.dataset);

    std::vector<RunTrace> traces(seeds.size());
    parallel_for(seeds.size(), o.jobs, [&](std::size_t i) {
        RunConfig config = base_config;
        config.seed = seeds[i];
        const auto split = split_and_shuffle(data, o.train_fraction, seeds[i]);
        traces[i] = run_trial(config, split.train, split.test);
    });

    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        auto r = trace_rows(seeds[i], traces[i]);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (!out_path.empty()) {
        auto f = open_output(out_path);
        write_metrics_csv(f, rows);
    }
    if (!json_path.empty()) {
        auto f = open_output(json_path);
        f << metrics_to_json(rows) << '\n';
    }

    const std::string tag = traces.empty() ? std::string() : traces.front().ensemble_tag;
    const bool has_ensemble = !tag.empty();
    json trials = json::array();
    double sums[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const RunTrace& t = traces[i];
        const double rop_base = curve_rop(t.base_curve());
        json trial = {{"seed", seeds[i]},
                      {"final_base_acc", t.summary.final_base_acc},
                      {"final_base_sparsity", t.summary.final_base_sparsity},
                      {"rop_base", rop_base},
                      {"aggressive_steps", t.summary.aggressive_steps}};
        sums[0] += t.summary.final_base_acc;
        sums[1] += t.summary.final_base_sparsity;
        sums[2] += rop_base;
        if (has_ensemble) {
            const double rop_ens = rop(oracle_curve(t.base_curve()), t.ensemble_curve());
            trial["final_ensemble_acc"] = t.summary.final_ensemble_acc;
            trial["final_ensemble_sparsity"] = t.summary.final_ensemble_sparsity;
            trial["rop_ensemble"] = rop_ens;
            trial["offers"] = t.summary.offers;
            trial["ensemble_members"] = t.summary.ensemble_members;
            sums[3] += t.summary.final_ensemble_acc;
            sums[4] += t.summary.final_ensemble_sparsity;
            sums[5] += rop_ens;
        }
        trials.push_back(std::move(trial));
    }
    const double n = static_cast<double>(seeds.size());
    json mean = {{"final_base_acc", sums[0] / n},
                 {"final_base_sparsity", sums[1] / n},
                 {"rop_base", sums[2] / n}};
    if (has_ensemble) {
        mean["final_ensemble_acc"] = sums[3] / n;
        mean["final_ensemble_sparsity"] = sums[4] / n;
        mean["rop_ensemble"] = sums[5] / n;
    }
    json summary = {{"dataset", o.dataset},
                    {"algo", std::string(to_string(base_config.algorithm))},
                    {"ensemble", has_ensemble ? json(tag) : json(nullptr)},
                    {"dimension", traces.empty() ? 0 : traces.front().dimension},
                    {"checkpoints", traces.empty() ? 0 : traces.front().records.size()},
                    {"trials", std::move(trials)},
                    {"mean", std::move(mean)}};
    out << summary.dump(2) << '\n';
    if (!summary_path.empty()) {
        auto f = open_output(summary_path);
        f << summary.dump(2) << '\n';
    }
    return kExitOk;
}

struct SweepOptions {
    std::string c_grid;
    std::string eta_grid;
    std::string lambda_grid;
};

std::vector<double> decades(int lo, int hi) {
    std::vector<double> v;
    for (int e = lo; e <= hi; ++e) v.push_back(std::pow(10.0, e));
    return v;
}

int cmd_sweep(const TrialOptions& o, const SweepOptions& s, const std::string& out_path, std::ostream& out) {
    const RunConfig base_config = build_config(o);
    const Algorithm algo = base_config.algorithm;
    if (algo != Algorithm::PA2 && algo != Algorithm::PA1 && algo != Algorithm::FSOL) {
        throw UsageError("sweep supports --algo pac, pa1 and fsol");
    }
    if (base_config.wrs || base_config.baseline != BaselineScheme::None) {
        throw UsageError("sweep tunes the base learner; drop --wrs and --baseline");
    }

    std::vector<SweepCell> cells;
    if (algo == Algorithm::FSOL) {
        std::vector<double> etas;
        for (int e = -3; e <= 9; ++e) etas.push_back(std::ldexp(1.0, e));
        std::vector<double> lambdas = {0.0};
        for (double d : decades(-3, 3)) lambdas.push_back(d);
        if (!s.eta_grid.empty()) etas = parse_double_list(s.eta_grid);
        if (!s.lambda_grid.empty()) lambdas = parse_double_list(s.lambda_grid);
        for (double eta : etas) {
            for (double lambda : lambdas) cells.push_back({o.hyper.c_err, eta, lambda, 0.0, 0.0});
        }
    } else {
        std::vector<double> cs = decades(-3, 3);
        if (!s.c_grid.empty()) cs = parse_double_list(s.c_grid);
        for (double c : cs) cells.push_back({c, o.hyper.eta, o.hyper.lambda, 0.0, 0.0});
    }
    for (const SweepCell& cell : cells) {
        Hyperparams hp = base_config.hyper;
        hp.c_err = cell.c_err;
        hp.eta = cell.eta;
        hp.lambda = cell.lambda;
        try {
            validate(algo, hp);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("grid cell: ") + e.what());
        }
    }

    const auto seeds = parse_seed_list(o.seeds);
    const auto data = load_dataset(o.dataset);
    std::vector<TrainTestSplit> splits(seeds.size());
    parallel_for(seeds.size(), o.jobs,
                 [&](std::size_t i) { splits[i] = split_and_shuffle(data, o.train_fraction, seeds[i]); });

    const std::size_t n_seeds = seeds.size();
    std::vector<double> final_acc(cells.size() * n_seeds);
    std::vector<double> rops(cells.size() * n_seeds);
    parallel_for(cells.size() * n_seeds, o.jobs, [&](std::size_t job) {
        const std::size_t cell = job / n_seeds;
        const std::size_t seed = job % n_seeds;
        RunConfig config = base_config;
        config.seed = seeds[seed];
        config.hyper.c_err = cells[cell].c_err;
        config.hyper.eta = cells[cell].eta;
        config.hyper.lambda = cells[cell].lambda;
        const RunTrace t = run_baseline(config, splits[seed].train, splits[seed].test);
        final_acc[job] = t.summary.final_base_acc;
        rops[job] = curve_rop(t.base_curve());
    });
    for (std::size_t c = 0; c < cells.size(); ++c) {
        double acc = 0.0;
        double r = 0.0;
        for (std::size_t i = 0; i < n_seeds; ++i) {
            acc += final_acc[c * n_seeds + i];
            r += rops[c * n_seeds + i];
        }
        cells[c].mean_final_acc = acc / static_cast<double>(n_seeds);
        cells[c].mean_rop = r / static_cast<double>(n_seeds);
    }
    const std::size_t chosen = select_sweep_cell(cells);

    if (!out_path.empty()) {
        auto f = open_output(out_path);
        f << "cell,c_err,eta,lambda,mean_final_acc,mean_rop,selected\n";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            f << c << ',' << shortest(cells[c].c_err) << ',' << shortest(cells[c].eta) << ','
              << shortest(cells[c].lambda) << ',' << fixed6(cells[c].mean_final_acc) << ','
              << fixed6(cells[c].mean_rop) << ',' << (c == chosen ? 1 : 0) << '\n';
        }
    }
    json j_cells = json::array();
    for (const SweepCell& c : cells) {
        j_cells.push_back({{"c_err", c.c_err},
                           {"eta", c.eta},
                           {"lambda", c.lambda},
                           {"mean_final_acc", c.mean_final_acc},
                           {"mean_rop", c.mean_rop}});
    }
    json summary = {{"dataset", o.dataset},
                    {"algo", std::string(to_string(algo))},
                    {"seeds", seeds},
                    {"cells", std::move(j_cells)},
                    {"selected_index", chosen},
                    {"selected", {{"c_err", cells[chosen].c_err},
                                  {"eta", cells[chosen].eta},
                                  {"lambda", cells[chosen].lambda},
                                  {"mean_final_acc", cells[chosen].mean_final_acc},
                                  {"mean_rop", cells[chosen].mean_rop}}}};
    out << summary.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- synth / stats

json stats_json(const DatasetStats& s) {
    return {{"n_examples", s.n_examples},
            {"max_index", s.max_index},
            {"dimension", s.dimension},
            {"nonzeros", s.nonzeros},
            {"sparsity", s.sparsity}};
}

int cmd_synth(const SynthParams& p, const std::string& out_path, std::ostream& out) {
    try {
        validate(p);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const SynthDataset ds = synth_noisy_stream(p);
    {
        auto f = open_output(out_path);
        write_libsvm(f, ds.examples);
        if (!f) throw std::runtime_error("failed writing '" + out_path + "'");
    }
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < ds.examples.size(); ++i) flipped += ds.examples[i].y != ds.clean_labels[i];

    json sidecar = {{"generator", "noisy_stream"},
                    {"dimension", p.dimension},
                    {"n_examples", p.n_examples},
                    {"flip_prob", p.flip_prob},
                    {"margin", p.margin},
                    {"density", p.density},
                    {"seed", p.seed},
                    {"flipped", flipped},
                    {"stats", stats_json(compute_stats(ds.examples, p.dimension))}};
    {
        auto f = open_output(out_path + ".json");
        f << sidecar.dump(2) << '\n';
    }
    out << sidecar.dump(2) << '\n';
    return kExitOk;
}

int cmd_stats(const std::string& dataset, std::size_t dim, std::ostream& out) {
    const auto data = load_dataset(dataset);
    DatasetStats s;
    try {
        s = compute_stats(data, dim);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json j = stats_json(s);
    j["dataset"] = dataset;
    out << j.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- compare

using FileCurves = std::map<std::uint64_t, std::map<std::string, AccuracyCurve>>;

FileCurves load_curves(const std::string& path) {
    FileCurves curves;
    for (const MetricsRow& r : read_metrics_csv_file(path)) {
        AccuracyCurve& c = curves[r.seed][r.model];
        if (!c.empty() && c.back().timestep >= r.timestep) {
            throw std::runtime_error(path + ": timesteps for seed " + std::to_string(r.seed) + " model " +
                                     r.model + " are not increasing");
        }
        c.push_back({r.timestep, r.test_acc});
    }
    if (curves.empty()) throw std::runtime_error(path + ": no rows");
    return curves;
}

std::string resolve_model(const FileCurves& curves, const std::string& requested, const std::string& path) {
    if (requested != "auto") {
        for (const auto& [seed, models] : curves) {
            if (!models.contains(requested)) {
                throw std::runtime_error(path + ": seed " + std::to_string(seed) + " has no '" + requested +
                                         "' rows");
            }
        }
        return requested;
    }
    for (const auto& [name, curve] : curves.begin()->second) {
        if (name != "base" && name != "oracle") return name;
    }
    return "base";
}

double seed_rop(const std::map<std::string, AccuracyCurve>& models, const std::string& model,
                const std::string& path) {
    AccuracyCurve oracle;
    if (const auto it = models.find("oracle"); it != models.end()) {
        oracle = it->second;
    } else if (const auto b = models.find("base"); b != models.end()) {
        oracle = oracle_curve(b->second);
    } else {
        throw std::runtime_error(path + ": neither oracle nor base rows to measure ROP against");
    }
    const auto m = models.find(model);
    if (m == models.end()) throw std::runtime_error(path + ": missing '" + model + "' rows");
    try {
        return rop(oracle, m->second);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

bool same_timesteps(const AccuracyCurve& a, const AccuracyCurve& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const CurvePoint& x, const CurvePoint& y) { return x.timestep == y.timestep; });
}

int cmd_compare(const std::vector<std::string>& baseline, const std::vector<std::string>& candidate,
                const std::string& baseline_model, const std::string& candidate_model,
                const std::string& out_path, const std::string& json_path, std::ostream& out) {
    if (baseline.size() != candidate.size()) {
        throw UsageError("--baseline and --candidate need the same number of files");
    }
    for (const auto& p : baseline) {
        if (!std::filesystem::is_regular_file(p)) throw UsageError("metrics file '" + p + "' not found");
    }
    for (const auto& p : candidate) {
        if (!std::filesystem::is_regular_file(p)) throw UsageError("metrics file '" + p + "' not found");
    }
    const Comparison cmp = compare_files(baseline, candidate, baseline_model, candidate_model);

    std::string table = "baseline,candidate,baseline_model,candidate_model,seeds,baseline_rop,candidate_rop,delta\n";
    for (const ComparisonRow& r : cmp.rows) {
        table += r.baseline_file + ',' + r.candidate_file + ',' + r.baseline_model + ',' + r.candidate_model + ',' +
                 std::to_string(r.seeds) + ',' + fixed6(r.baseline_rop) + ',' + fixed6(r.candidate_rop) + ',' +
                 fixed6(r.delta) + '\n';
    }
    out << table;
    out << "candidate wins " << cmp.candidate_wins << '/' << cmp.rows.size() << ", baseline wins "
        << cmp.baseline_wins << ", ties " << cmp.ties << '\n';
    json j_w;
    if (cmp.wilcoxon) {
        const WilcoxonResult& w = *cmp.wilcoxon;
        out << "wilcoxon n=" << w.n << " W+=" << w.w_plus << " W-=" << w.w_minus << " p=" << w.p_value
            << (w.exact ? " (exact)" : " (normal approximation)") << '\n';
        j_w = {{"n", w.n}, {"w_plus", w.w_plus}, {"w_minus", w.w_minus}, {"statistic", w.statistic},
               {"z", w.z}, {"p_value", w.p_value}, {"exact", w.exact}};
    } else {
        out << "wilcoxon degenerate: every ROP delta is zero\n";
    }
    if (!out_path.empty()) {
        auto f = open_output(out_path);
        f << table;
    }
    if (!json_path.empty()) {
        json rows = json::array();
        for (const ComparisonRow& r : cmp.rows) {
            rows.push_back({{"baseline_file", r.baseline_file},
                            {"candidate_file", r.candidate_file},
                            {"baseline_model", r.baseline_model},
                            {"candidate_model", r.candidate_model},
                            {"seeds", r.seeds},
                            {"baseline_rop", r.baseline_rop},
                            {"candidate_rop", r.candidate_rop},
                            {"delta", r.delta}});
        }
        json j = {{"rows", std::move(rows)},
                  {"candidate_wins", cmp.candidate_wins},
                  {"baseline_wins", cmp.baseline_wins},
                  {"ties", cmp.ties},
                  {"wilcoxon", cmp.wilcoxon ? j_w : json(nullptr)}};
        auto f = open_output(json_path);
        f << j.dump(2) << '\n';
    }
    return kExitOk;
}

std::string json_scalar(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) return shortest(v.get<double>());
    throw UsageError("config key '" + key + "' has an unsupported value");
}

}  // namespace

// ---------------------------------------------------------------- public helpers

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    std::vector<std::string> rest;
    bool found = false;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            path = args[++i];
            found = true;
        } else if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            found = true;
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!found || args.empty()) return args;

    std::ifstream in(path);
    if (!in) throw UsageError("config file '" + path + "' not found");
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config file '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");

    std::vector<std::string> expanded = {args[0]};
    for (const auto& [key, value] : cfg.items()) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (value.is_null()) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) expanded.push_back(flag);
            continue;
        }
        expanded.push_back(flag);
        if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ',';
                joined += json_scalar(item, key);
            }
            expanded.push_back(joined);
        } else {
            expanded.push_back(json_scalar(value, key));
        }
    }
    expanded.insert(expanded.end(), rest.begin(), rest.end());
    return expanded;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    for (const std::string& part : split_list(text)) {
        if (part.empty()) throw UsageError("empty entry in seed list '" + std::string(text) + "'");
        std::size_t sep = part.find("..");
        std::size_t sep_len = 2;
        if (sep == std::string::npos) {
            sep = part.find('-');
            sep_len = 1;
        }
        if (sep == std::string::npos) {
            seeds.push_back(parse_u64(part, "seed"));
            continue;
        }
        const std::uint64_t lo = parse_u64(trim(std::string_view(part).substr(0, sep)), "seed");
        const std::uint64_t hi = parse_u64(trim(std::string_view(part).substr(sep + sep_len)), "seed");
        if (hi < lo) throw UsageError("descending seed range '" + part + "'");
        if (hi - lo >= 1'000'000) throw UsageError("seed range '" + part + "' is too long");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw UsageError("no seeds given");
    return seeds;
}

std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> values;
    for (const std::string& part : split_list(text)) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
            throw UsageError("bad number '" + part + "' in list '" + std::string(text) + "'");
        }
        values.push_back(v);
    }
    return values;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, n);
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
}

std::size_t select_sweep_cell(std::span<const SweepCell> cells) {
    if (cells.empty()) throw std::invalid_argument("no sweep cells");
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cells[a].mean_final_acc > cells[b].mean_final_acc;
    });
    const auto top = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(0.025 * static_cast<double>(cells.size()))));
    std::size_t best = order[0];
    for (std::size_t r = 1; r < top; ++r) {
        const std::size_t i = order[r];
        if (cells[i].mean_rop > cells[best].mean_rop ||
            (cells[i].mean_rop == cells[best].mean_rop && i < best)) {
            best = i;
        }
    }
    return best;
}

Comparison compare_files(const std::vector<std::string>& baseline_files,
                         const std::vector<std::string>& candidate_files, const std::string& baseline_model,
                         const std::string& candidate_model) {
    if (baseline_files.size() != candidate_files.size()) {
        throw std::runtime_error("baseline and candidate file counts differ");
    }
    if (baseline_files.empty()) throw std::runtime_error("nothing to compare");

    Comparison cmp;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < baseline_files.size(); ++i) {
        const std::string& bp = baseline_files[i];
        const std::string& cp = candidate_files[i];
        const FileCurves b = load_curves(bp);
        const FileCurves c = load_curves(cp);
        if (b.size() != c.size() ||
            !std::equal(b.begin(), b.end(), c.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
            throw std::runtime_error("seed mismatch between '" + bp + "' and '" + cp + "'");
        }
        ComparisonRow row;
        row.baseline_file = bp;
        row.candidate_file = cp;
        row.baseline_model = resolve_model(b, baseline_model, bp);
        row.candidate_model = resolve_model(c, candidate_model, cp);
        row.seeds = b.size();
        for (const auto& [seed, models] : b) {
            const auto& cm = c.at(seed);
            const auto bm = models.find(row.baseline_model);
            const auto cmm = cm.find(row.candidate_model);
            if (bm == models.end() || cmm == cm.end()) {
                throw std::runtime_error("seed " + std::to_string(seed) + " lacks the compared model rows");
            }
            if (!same_timesteps(bm->second, cmm->second)) {
                throw std::runtime_error("timestep mismatch for seed " + std::to_string(seed) + " between '" + bp +
                                         "' and '" + cp + "'");
            }
            row.baseline_rop += seed_rop(models, row.baseline_model, bp);
            row.candidate_rop += seed_rop(cm, row.candidate_model, cp);
        }
        row.baseline_rop /= static_cast<double>(row.seeds);
        row.candidate_rop /= static_cast<double>(row.seeds);
        row.delta = row.baseline_rop - row.candidate_rop;
        if (row.delta > 0.0) {
            ++cmp.candidate_wins;
        } else if (row.delta < 0.0) {
            ++cmp.baseline_wins;
        } else {
            ++cmp.ties;
        }
        pairs.emplace_back(row.baseline_rop, row.candidate_rop);
        cmp.rows.push_back(std::move(row));
    }
    if (cmp.ties < cmp.rows.size()) cmp.wilcoxon = wilcoxon_signed_rank(pairs);
    return cmp;
}

// ---------------------------------------------------------------- entry point

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Weighted-reservoir ensembles for online linear classifiers", "wat"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    std::string config_path;
    TrialOptions run_opts;
    std::string run_out, run_json, run_summary;
    CLI::App* run = app.add_subcommand("run", "train over each seed's shuffle and log checkpoint metrics");
    add_trial_options(run, run_opts, config_path);
    add_ensemble_options(run, run_opts);
    run->add_option("--out", run_out, "metrics CSV");
    run->add_option("--json", run_json, "metrics rows as JSON");
    run->add_option("--summary", run_summary, "also write the summary JSON here");

    TrialOptions sweep_opts;
    sweep_opts.algo = "pac";
    SweepOptions grid;
    std::string sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "grid-search base hyperparameters and pick a cell");
    add_trial_options(sweep, sweep_opts, config_path);
    sweep->add_option("--c-grid", grid.c_grid, "C values for pac/pa1 (default 1e-3..1e3 decades)");
    sweep->add_option("--eta-grid", grid.eta_grid, "eta values for fsol (default 2^-3..2^9)");
    sweep->add_option("--lambda-grid", grid.lambda_grid, "lambda values for fsol (default 0 and 1e-3..1e3)");
    sweep->add_option("--out", sweep_out, "per-cell results CSV");

    SynthParams synth_params;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand("synth", "write a noisy linearly separable LIBSVM stream");
    synth->add_option("--config", config_path, "JSON file of flag values");
    synth->add_option("--dim", synth_params.dimension, "feature dimension")->capture_default_str();
    synth->add_option("--n", synth_params.n_examples, "number of examples")->capture_default_str();
    synth->add_option("--flip", synth_params.flip_prob, "label flip probability in [0, 0.5)")->capture_default_str();
    synth->add_option("--margin", synth_params.margin, "minimum |<w*, x>|")->capture_default_str();
    synth->add_option("--density", synth_params.density, "fraction of nonzero features")->capture_default_str();
    synth->add_option("--seed", synth_params.seed, "generator seed")->capture_default_str();
    synth->add_option("--out", synth_out, "output LIBSVM file; parameters go to <out>.json")->required();

    std::vector<std::string> cmp_baseline, cmp_candidate;
    std::string cmp_baseline_model = "auto", cmp_candidate_model = "auto", cmp_out, cmp_json;
    CLI::App* compare = app.add_subcommand("compare", "per-dataset ROP deltas, win counts and a Wilcoxon test");
    compare->add_option("--config", config_path, "JSON file of flag values");
    compare->add_option("--baseline", cmp_baseline, "metrics CSVs of the reference method, one per dataset")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    compare->add_option("--candidate", cmp_candidate, "metrics CSVs of the method under test, same order")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    compare->add_option("--baseline-model", cmp_baseline_model, "model tag to read (auto: ensemble tag, else base)")
        ->capture_default_str();
    compare->add_option("--candidate-model", cmp_candidate_model, "model tag to read")->capture_default_str();
    compare->add_option("--out", cmp_out, "comparison table CSV");
    compare->add_option("--json", cmp_json, "comparison JSON");

    std::string stats_dataset;
    std::size_t stats_dim = 0;
    CLI::App* stats = app.add_subcommand("stats", "dataset size, dimension and sparsity");
    stats->add_option("--config", config_path, "JSON file of flag values");
    stats->add_option("--dataset", stats_dataset, "LIBSVM file")->required();
    stats->add_option("--dim", stats_dim, "declared feature dimension (0: largest index + 1)");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("wat");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_opts, run_out, run_json, run_summary, out);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, grid, sweep_out, out);
        if (synth->parsed()) return cmd_synth(synth_params, synth_out, out);
        if (compare->parsed()) {
            return cmd_compare(cmp_baseline, cmp_candidate, cmp_baseline_model, cmp_candidate_model, cmp_out,
                               cmp_json, out);
        }
        if (stats->parsed()) return cmd_stats(stats_dataset, stats_dim, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace wat::cli
