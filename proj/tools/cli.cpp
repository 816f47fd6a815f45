#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dalc/bounds.hpp"
#include "dalc/data.hpp"
#include "dalc/decision_grid.hpp"
#include "dalc/estimators.hpp"
#include "dalc/kernels.hpp"
#include "dalc/model.hpp"
#include "dalc/synthetic.hpp"
#include "dalc/validation.hpp"

namespace dalc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flag values detected after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

/// "a:b:n" for n log-spaced values, otherwise a comma-separated list.
std::vector<double> parse_grid_arg(const std::string& text) {
    if (std::count(text.begin(), text.end(), ':') == 2) {
        const auto p1 = text.find(':'), p2 = text.find(':', p1 + 1);
        try {
            const double lo = std::stod(text.substr(0, p1));
            const double hi = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
            const long n = std::stol(text.substr(p2 + 1));
            if (n < 1)
                throw UsageError("grid '" + text + "': count must be positive");
            return log_space(lo, hi, static_cast<std::size_t>(n));
        } catch (const std::invalid_argument& e) {
            throw UsageError("grid '" + text + "': " + e.what());
        }
    }
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !(v > 0.0))
                throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("grid '" + text + "': '" + item + "' is not a positive number");
        }
    }
    if (values.empty())
        throw UsageError("grid '" + text + "' is empty");
    return values;
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw UsageError("range '" + text + "' must look like lo:hi");
    try {
        const double lo = std::stod(text.substr(0, colon));
        const double hi = std::stod(text.substr(colon + 1));
        if (!(hi > lo))
            throw UsageError("range '" + text + "' is empty");
        return {lo, hi};
    } catch (const std::invalid_argument&) {
        throw UsageError("range '" + text + "' must look like lo:hi");
    }
}

struct DataOptions {
    std::string format = "auto";
    std::size_t dim = 0;  // 0: inferred
    std::string label_column = "label";

    void add_to(CLI::App* app) {
        app->add_option("--format", format, "Data format")
            ->check(CLI::IsMember({"auto", "sparse", "csv"}))
            ->capture_default_str();
        app->add_option("--dim", dim, "Feature dimension for sparse files (0: infer)");
        app->add_option("--label-column", label_column, "Label column name for CSV files")
            ->capture_default_str();
    }

    bool is_csv(const fs::path& path) const {
        if (format == "auto")
            return path.extension() == ".csv";
        return format == "csv";
    }
};

bool csv_has_column(const fs::path& path, const std::string& column) {
    std::ifstream in(path);
    std::string header;
    while (std::getline(in, header)) {
        if (header.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::stringstream ss(header);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto a = cell.find_first_not_of(" \t\r");
            const auto b = cell.find_last_not_of(" \t\r");
            if (a != std::string::npos && cell.substr(a, b - a + 1) == column)
                return true;
        }
        return false;
    }
    return false;
}

Dataset load_data(const fs::path& path, Role role, const DataOptions& opt) {
    if (!fs::exists(path))
        throw std::runtime_error("no such file: " + path.string());
    if (opt.is_csv(path)) {
        std::optional<std::string> label;
        if (csv_has_column(path, opt.label_column))
            label = opt.label_column;
        return load_csv(path, label, role);
    }
    std::optional<std::size_t> dim;
    if (opt.dim > 0)
        dim = opt.dim;
    return load_sparse(path, dim, role);
}

struct OptimizerOptions {
    std::size_t max_iter = 1000;
    double tol = 1e-6;
    std::string method = "quasi-newton";

    void add_to(CLI::App* app) {
        app->add_option("--max-iter", max_iter, "Optimizer iteration cap")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--tol", tol, "Gradient infinity-norm tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--method", method, "Optimizer")
            ->check(CLI::IsMember({"quasi-newton", "gradient-descent"}))
            ->capture_default_str();
    }

    OptimizerConfig config() const {
        OptimizerConfig c;
        c.max_iterations = max_iter;
        c.gradient_tolerance = tol;
        c.method = parse_method(method);
        return c;
    }

    json to_json() const { return {{"max_iter", max_iter}, {"tol", tol}, {"method", method}}; }
};

struct KernelOptions {
    std::string kernel = "rbf";
    double gamma = 1.0;

    void add_to(CLI::App* app, bool required) {
        auto* k = app->add_option("--kernel", kernel, "Kernel family")
                      ->check(CLI::IsMember({"linear", "rbf"}));
        if (required)
            k->required();
        else
            k->capture_default_str();
        app->add_option("--gamma", gamma, "RBF kernel width: exp(-gamma |x - x'|^2)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    KernelSpec spec() const { return parse_kernel(kernel, gamma); }
};

json kernel_json(const KernelSpec& k) {
    json j = {{"family", k.name()}};
    if (k.family == KernelFamily::Rbf)
        j["gamma"] = k.gamma;
    return j;
}

json trace_json(const OptimizerTrace& t) {
    return {{"iterations", t.iterations},
            {"converged", t.converged},
            {"final_gradient_norm", t.final_gradient_norm},
            {"initial_objective", t.objective_values.front()},
            {"final_objective", t.objective_values.back()}};
}

json base_report(const std::string& command, int argc, const char* const* argv) {
    json args = json::array();
    for (int i = 0; i < argc; ++i)
        args.push_back(argv[i]);
    return {{"command", command}, {"argv", args}, {"config", json::object()},
            {"outputs", json::object()}, {"metrics", json::object()},
            {"timings", json::object()}};
}

fs::path report_path_for(const std::string& explicit_path, const fs::path& primary) {
    if (!explicit_path.empty())
        return explicit_path;
    fs::path p = primary;
    p += ".report.json";
    return p;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string source, target, out, report;
    KernelOptions kernel;
    double B = 1.0, C = 1.0;
    bool primal = false;
    OptimizerOptions opt;
    DataOptions data;
};

int cmd_train(const TrainArgs& a, json report, std::ostream& out) {
    const auto t0 = Clock::now();
    const KernelSpec kernel = a.kernel.spec();
    if (a.primal && kernel.family != KernelFamily::Linear)
        throw UsageError("--primal requires --kernel linear");
    const DalcHyperparams hp{a.B, a.C};
    const Dataset source = load_data(a.source, Role::Source, a.data);
    const Dataset target = load_data(a.target, Role::Target, a.data).without_labels();
    if (!source.labeled())
        throw std::runtime_error("source file " + a.source + " is unlabeled");

    TrainOptions options;
    options.primal = a.primal;
    const auto t_train = Clock::now();
    const DalcModel model = train(source, target, kernel, hp, a.opt.config(), options);
    const double train_seconds = seconds_since(t_train);
    save_model(model, a.out);

    const double d_hat = empirical_disagreement(model, target);
    const double e_hat = empirical_joint_error(model, source);
    const double source_error = empirical_vote_risk(model, source);

    report["config"] = {{"source", a.source}, {"target", a.target},
                        {"kernel", kernel_json(kernel)}, {"B", a.B}, {"C", a.C},
                        {"form", a.primal ? "primal" : "dual"}, {"optimizer", a.opt.to_json()}};
    report["outputs"] = {{"model", a.out}};
    report["metrics"] = {{"m_s", source.size()},
                         {"m_t", target.size()},
                         {"trace", trace_json(model.trace())},
                         {"target_disagreement", d_hat},
                         {"source_joint_error", e_hat},
                         {"source_error", source_error},
                         {"kl", model.kl()}};
    report["timings"] = {{"train_seconds", train_seconds}, {"total_seconds", seconds_since(t0)}};
    const fs::path rp = report_path_for(a.report, a.out);
    report["outputs"]["report"] = rp.string();
    write_json(rp, report);

    out << "trained " << (a.primal ? "primal" : "dual") << " model on " << source.size()
        << " source / " << target.size() << " target points\n"
        << "  objective        " << fmt4(model.trace().objective_values.back()) << '\n'
        << "  iterations       " << model.trace().iterations
        << (model.trace().converged ? " (converged)" : " (not converged)") << '\n'
        << "  target disagr.   " << fmt4(d_hat) << '\n'
        << "  source joint err " << fmt4(e_hat) << '\n'
        << "  source error     " << fmt4(source_error) << '\n'
        << "model written to " << a.out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
    std::string model, data, out, report;
    DataOptions data_opt;
};

int cmd_predict(const PredictArgs& a, json report, std::ostream& out) {
    const auto t0 = Clock::now();
    const DalcModel model = load_model(a.model);
    const Dataset data = load_data(a.data, Role::Target, a.data_opt);
    if (data.dim() > model.dim())
        throw std::runtime_error("data dimension " + std::to_string(data.dim()) +
                                 " exceeds the model dimension " + std::to_string(model.dim()));
    const std::vector<int> predicted = model.predict(data);
    save_labels(a.out, predicted);

    report["config"] = {{"model", a.model}, {"data", a.data}};
    report["outputs"] = {{"predictions", a.out}};
    report["metrics"] = {{"n", data.size()}};
    out << "wrote " << predicted.size() << " predictions to " << a.out << '\n';
    if (data.labeled()) {
        const double err = zero_one_error(predicted, data.labels());
        report["metrics"]["error"] = err;
        out << "error: " << fmt4(err) << '\n';
    }
    report["timings"] = {{"total_seconds", seconds_since(t0)}};
    const fs::path rp = report_path_for(a.report, a.out);
    report["outputs"]["report"] = rp.string();
    write_json(rp, report);
    return kExitOk;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    std::string model, source, target, out;
    double b = 1.0, c = 1.0, delta = 0.05, beta_inf = 1.0;
    std::optional<double> eta, outside_mass, q, beta_q;
    std::string sweep_b, sweep_c;
    DataOptions data;
};

json bound_report_json(const BoundReport& r) {
    json j = {{"b_prime", r.b_prime},
              {"c_prime", r.c_prime},
              {"ideal_plugin", r.ideal_plugin},
              {"disagreement_bound", r.disagreement_bound},
              {"joint_error_bound", r.joint_error_bound},
              {"target_gibbs_bound", r.target_gibbs_bound},
              {"target_vote_bound", r.target_vote_bound}};
    if (r.source_gibbs_bound)
        j["source_gibbs_bound"] = *r.source_gibbs_bound;
    return j;
}

int cmd_bounds(const BoundsArgs& a, json report, std::ostream& out) {
    const auto t0 = Clock::now();
    if (a.q.has_value() != a.beta_q.has_value())
        throw UsageError("--q and --beta-q must be given together");
    const double eta = [&] {
        try {
            return resolve_eta(a.eta, a.outside_mass);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    const DalcModel model = load_model(a.model);
    const Dataset source = load_data(a.source, Role::Source, a.data);
    const Dataset target = load_data(a.target, Role::Target, a.data).without_labels();
    if (!source.labeled())
        throw std::runtime_error("source file " + a.source + " is unlabeled");

    BoundInputs in;
    in.d_hat = empirical_disagreement(model, target);
    in.e_hat = empirical_joint_error(model, source);
    in.gibbs_hat = empirical_gibbs_risk(model, source);
    in.kl = model.kl();
    in.m_s = source.size();
    in.m_t = target.size();
    in.b = a.b;
    in.c = a.c;
    in.delta = a.delta;
    in.beta_inf = a.beta_inf;
    in.eta = eta;
    in.q = a.q;
    in.beta_q = a.beta_q;
    const BoundReport r = da_generalization_bound(in);

    report["config"] = {{"model", a.model}, {"source", a.source}, {"target", a.target},
                        {"b", a.b}, {"c", a.c}, {"delta", a.delta}, {"beta_inf", a.beta_inf},
                        {"eta", eta}};
    if (a.q) {
        report["config"]["q"] = *a.q;
        report["config"]["beta_q"] = *a.beta_q;
    }
    report["metrics"] = {{"estimates",
                          {{"target_disagreement", in.d_hat},
                           {"source_joint_error", in.e_hat},
                           {"source_gibbs_risk", *in.gibbs_hat},
                           {"kl", in.kl},
                           {"m_s", in.m_s},
                           {"m_t", in.m_t}}},
                         {"bounds", bound_report_json(r)}};

    out << "estimates\n"
        << "  target disagreement   " << fmt4(in.d_hat) << '\n'
        << "  source joint error    " << fmt4(in.e_hat) << '\n'
        << "  source Gibbs risk     " << fmt4(*in.gibbs_hat) << '\n'
        << "  KL                    " << fmt4(in.kl) << '\n'
        << "bounds (delta = " << fmt4(a.delta) << ", b' = " << fmt4(r.b_prime)
        << ", c' = " << fmt4(r.c_prime) << ")\n"
        << "  ideal (plug-in)       " << fmt4(r.ideal_plugin) << '\n';
    if (r.source_gibbs_bound)
        out << "  source Gibbs risk     " << fmt4(*r.source_gibbs_bound) << '\n';
    out << "  target disagreement   " << fmt4(r.disagreement_bound) << '\n'
        << "  source joint error    " << fmt4(r.joint_error_bound) << '\n'
        << "  target Gibbs risk     " << fmt4(r.target_gibbs_bound) << '\n'
        << "  target vote risk      " << fmt4(r.target_vote_bound) << '\n';

    if (!a.sweep_b.empty() || !a.sweep_c.empty()) {
        const auto bs = a.sweep_b.empty() ? std::vector<double>{a.b} : parse_grid_arg(a.sweep_b);
        const auto cs = a.sweep_c.empty() ? std::vector<double>{a.c} : parse_grid_arg(a.sweep_c);
        const BoundSweep s = sweep_bound(in, bs, cs);
        json cells = json::array();
        for (std::size_t bi = 0; bi < bs.size(); ++bi)
            for (std::size_t ci = 0; ci < cs.size(); ++ci)
                cells.push_back({{"b", bs[bi]}, {"c", cs[ci]}, {"target_vote_bound", s.at(bi, ci)}});
        report["metrics"]["sweep"] = {
            {"cells", cells},
            {"best", {{"b", bs[s.best_b_index]}, {"c", cs[s.best_c_index]},
                      {"target_vote_bound", s.best_value}}},
            {"note", "minimum over the grid without a union-bound correction"}};
        out << "sweep over " << bs.size() << " x " << cs.size() << " (b, c): best "
            << fmt4(s.best_value) << " at b = " << fmt4(bs[s.best_b_index])
            << ", c = " << fmt4(cs[s.best_c_index]) << " (no union-bound correction)\n";
    }
    report["timings"] = {{"total_seconds", seconds_since(t0)}};
    if (!a.out.empty()) {
        report["outputs"] = {{"report", a.out}};
        write_json(a.out, report);
    } else {
        out << report.dump(2) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- reverse-cv

struct ReverseCvArgs {
    std::string source, target, out_dir;
    KernelOptions kernel;
    std::string grid_c = "0.01:1e6:20", grid_b = "1:1e8:20";
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool primal = false;
    OptimizerOptions opt;
    DataOptions data;
};

int cmd_reverse_cv(const ReverseCvArgs& a, json report, std::ostream& out) {
    const auto t0 = Clock::now();
    const KernelSpec kernel = a.kernel.spec();
    if (a.primal && kernel.family != KernelFamily::Linear)
        throw UsageError("--primal requires --kernel linear");
    const GridSpec grid{parse_grid_arg(a.grid_c), parse_grid_arg(a.grid_b)};
    const Dataset source = load_data(a.source, Role::Source, a.data);
    const Dataset target = load_data(a.target, Role::Target, a.data).without_labels();
    if (!source.labeled())
        throw std::runtime_error("source file " + a.source + " is unlabeled");
    if (a.folds < 2 || a.folds > source.size())
        throw UsageError("--folds must lie in [2, m_s]");

    fs::create_directories(a.out_dir);
    TrainOptions options;
    options.primal = a.primal;
    const ReverseValidationReport rv = grid_search(source, target, kernel, grid, a.folds, a.seed,
                                                   a.opt.config(), options, a.threads);
    const double search_seconds = seconds_since(t0);

    const fs::path dir = a.out_dir;
    {
        std::ofstream csv(dir / "risk_matrix.csv");
        csv << "C\\B";
        char buf[32];
        for (double b : grid.b_values) {
            std::snprintf(buf, sizeof buf, "%.17g", b);
            csv << ',' << buf;
        }
        csv << '\n';
        for (std::size_t ci = 0; ci < grid.c_values.size(); ++ci) {
            std::snprintf(buf, sizeof buf, "%.17g", grid.c_values[ci]);
            csv << buf;
            for (std::size_t bi = 0; bi < grid.b_values.size(); ++bi) {
                std::snprintf(buf, sizeof buf, "%.17g", rv.at(ci, bi));
                csv << ',' << buf;
            }
            csv << '\n';
        }
    }
    const DalcHyperparams best = rv.selected();
    const json selection = {{"B", best.B},
                            {"C", best.C},
                            {"risk", rv.at(rv.selected_c_index, rv.selected_b_index)},
                            {"c_index", rv.selected_c_index},
                            {"b_index", rv.selected_b_index},
                            {"folds", a.folds},
                            {"seed", a.seed},
                            {"folds_skipped", rv.folds_skipped},
                            {"tie_break", "smallest B, then smallest C"}};
    write_json(dir / "selection.json", selection);

    const DalcModel model = train(source, target, kernel, best, a.opt.config(), options);
    save_model(model, dir / "model.json");

    report["config"] = {{"source", a.source}, {"target", a.target},
                        {"kernel", kernel_json(kernel)}, {"grid_c", grid.c_values},
                        {"grid_b", grid.b_values}, {"folds", a.folds}, {"seed", a.seed},
                        {"form", a.primal ? "primal" : "dual"}, {"optimizer", a.opt.to_json()}};
    report["outputs"] = {{"risk_matrix", (dir / "risk_matrix.csv").string()},
                         {"selection", (dir / "selection.json").string()},
                         {"model", (dir / "model.json").string()},
                         {"report", (dir / "report.json").string()}};
    report["metrics"] = {{"selection", selection},
                         {"trace", trace_json(model.trace())},
                         {"target_disagreement", empirical_disagreement(model, target)},
                         {"source_joint_error", empirical_joint_error(model, source)},
                         {"source_error", empirical_vote_risk(model, source)}};
    report["timings"] = {{"search_seconds", search_seconds}, {"total_seconds", seconds_since(t0)}};
    write_json(dir / "report.json", report);

    out << "reverse validation over " << grid.c_values.size() << " x " << grid.b_values.size()
        << " grid, " << a.folds << " folds\n"
        << "selected B = " << fmt4(best.B) << ", C = " << fmt4(best.C) << " (risk "
        << fmt4(rv.at(rv.selected_c_index, rv.selected_b_index)) << ")\n"
        << "outputs in " << a.out_dir << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- moons

struct MoonsArgs {
    std::size_t n = 300;
    double noise = 0.1, rotation = 30.0;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool run_experiment = false;
    double gamma = 1.0, B = 1.0, C = 1.0;
    std::size_t resolution = 100;
    OptimizerOptions opt;
};

GridBounds bounds_around(const Dataset& a, const Dataset& b) {
    double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
    for (const Dataset* d : {&a, &b}) {
        for (std::size_t i = 0; i < d->size(); ++i) {
            const auto x = d->dense_row(i);
            lo1 = std::min(lo1, x[0]);
            hi1 = std::max(hi1, x[0]);
            lo2 = std::min(lo2, x[1]);
            hi2 = std::max(hi2, x[1]);
        }
    }
    return {lo1 - 0.5, hi1 + 0.5, lo2 - 0.5, hi2 + 0.5};
}

int cmd_moons(const MoonsArgs& a, json report, std::ostream& out) {
    const auto t0 = Clock::now();
    MoonsConfig cfg{a.n, a.noise, a.rotation, a.seed};
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const AdaptationTask task = make_moons(cfg);
    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    save_sparse(dir / "source.svm", task.source);
    save_sparse(dir / "target.svm", task.target);
    save_labels(dir / "target_labels.txt", task.target_labels);

    report["config"] = {{"n", a.n}, {"noise", a.noise}, {"rotation", a.rotation}, {"seed", a.seed}};
    report["outputs"] = {{"source", (dir / "source.svm").string()},
                         {"target", (dir / "target.svm").string()},
                         {"target_labels", (dir / "target_labels.txt").string()},
                         {"report", (dir / "report.json").string()}};
    out << "wrote moons task (" << a.n << " points per domain, rotation " << fmt4(a.rotation)
        << " deg) to " << a.out_dir << '\n';

    if (a.run_experiment) {
        const KernelSpec kernel = KernelSpec::rbf(a.gamma);
        const DalcModel dalc = train(task.source, task.target, kernel, {a.B, a.C}, a.opt.config());
        const DalcModel baseline =
            train(task.source, task.target, kernel, {a.B, 0.0}, a.opt.config());
        const double dalc_err = zero_one_error(dalc.predict(task.target), task.target_labels);
        const double base_err = zero_one_error(baseline.predict(task.target), task.target_labels);
        const GridBounds gb = bounds_around(task.source, task.target);
        save_model(dalc, dir / "dalc_model.json");
        save_model(baseline, dir / "baseline_model.json");
        export_decision_grid(dalc, gb, a.resolution, dir / "decision_grid.csv");
        export_decision_grid(baseline, gb, a.resolution, dir / "baseline_grid.csv");
        report["config"]["experiment"] = {{"kernel", kernel_json(kernel)}, {"B", a.B}, {"C", a.C},
                                          {"baseline_C", 0.0}, {"resolution", a.resolution},
                                          {"optimizer", a.opt.to_json()}};
        report["outputs"]["dalc_model"] = (dir / "dalc_model.json").string();
        report["outputs"]["baseline_model"] = (dir / "baseline_model.json").string();
        report["outputs"]["decision_grid"] = (dir / "decision_grid.csv").string();
        report["outputs"]["baseline_grid"] = (dir / "baseline_grid.csv").string();
        report["metrics"] = {{"dalc_target_error", dalc_err},
                             {"baseline_target_error", base_err},
                             {"dalc_source_error", empirical_vote_risk(dalc, task.source)},
                             {"baseline_source_error", empirical_vote_risk(baseline, task.source)},
                             {"dalc_trace", trace_json(dalc.trace())},
                             {"baseline_trace", trace_json(baseline.trace())}};
        out << "target error  DALC " << fmt4(dalc_err) << "   source-only (C = 0) "
            << fmt4(base_err) << '\n';
    }
    report["timings"] = {{"total_seconds", seconds_since(t0)}};
    write_json(dir / "report.json", report);
    return kExitOk;
}

// ---------------------------------------------------------------- beta-q

struct BetaQArgs {
    std::string family = "two-atom";
    std::string source_probs = "0.5,0.5", target_probs = "0.25,0.75", shift = "1";
    std::string q = "2";
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    std::optional<double> eta, outside_mass;
    std::string report;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("'" + item + "' is not a number");
        }
    }
    return values;
}

double parse_q(const std::string& text) {
    if (text == "inf" || text == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double q = std::stod(text, &used);
        if (used != text.size() || !(q > 0.0))
            throw std::invalid_argument(text);
        return q;
    } catch (const std::exception&) {
        throw UsageError("--q must be a positive number or 'inf'");
    }
}

json number_or_string(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

int cmd_beta_q(const BetaQArgs& a, json report, std::ostream& out) {
    const auto t0 = Clock::now();
    const double q = parse_q(a.q);
    double eta = 0.0;
    try {
        eta = resolve_eta(a.eta, a.outside_mass);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    DivergenceEstimate est;
    double exact = 0.0;
    if (a.family == "two-atom" || a.family == "discrete") {
        std::optional<DiscreteShift> fam;
        try {
            fam.emplace(parse_list(a.source_probs), parse_list(a.target_probs));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        est = beta_q_monte_carlo(
            [&](std::span<const double> x, int y) { return fam->density_ratio(x, y); },
            [&](Rng& rng) { return fam->sample_source(rng); }, q, a.n, a.seed, eta);
        exact = fam->beta(q);
        report["config"] = {{"family", "discrete"}, {"source_probs", parse_list(a.source_probs)},
                            {"target_probs", parse_list(a.target_probs)}};
    } else {
        std::optional<GaussianShift> fam;
        try {
            fam.emplace(parse_list(a.shift));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        est = beta_q_monte_carlo(
            [&](std::span<const double> x, int y) { return fam->density_ratio(x, y); },
            [&](Rng& rng) { return fam->sample_source(rng); }, q, a.n, a.seed, eta);
        exact = fam->beta(q);
        report["config"] = {{"family", "gaussian"}, {"shift", parse_list(a.shift)}};
    }
    report["config"]["q"] = number_or_string(q);
    report["config"]["n"] = a.n;
    report["config"]["seed"] = a.seed;
    report["metrics"] = {{"beta_q", est.beta_q},
                         {"closed_form", number_or_string(exact)},
                         {"lower_bound", est.lower_bound},
                         {"eta", est.eta},
                         {"mc_samples", est.mc_samples}};
    report["timings"] = {{"total_seconds", seconds_since(t0)}};
    out << "beta_" << a.q << " estimate " << fmt4(est.beta_q)
        << (est.lower_bound ? " (max over draws: a lower bound on the sup)" : "")
        << ", closed form " << (std::isinf(exact) ? std::string("inf") : fmt4(exact))
        << ", eta " << fmt4(est.eta) << '\n';
    if (!a.report.empty()) {
        report["outputs"] = {{"report", a.report}};
        write_json(a.report, report);
    } else {
        out << report.dump(2) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- decision-grid

struct GridArgs {
    std::string model, out, report;
    std::string x1 = "-2:3", x2 = "-2:2.5";
    std::size_t resolution = 100;
};

int cmd_decision_grid(const GridArgs& a, json report, std::ostream& out) {
    const auto t0 = Clock::now();
    const auto [x1lo, x1hi] = parse_range(a.x1);
    const auto [x2lo, x2hi] = parse_range(a.x2);
    const DalcModel model = load_model(a.model);
    export_decision_grid(model, {x1lo, x1hi, x2lo, x2hi}, a.resolution, a.out);
    report["config"] = {{"model", a.model}, {"x1", a.x1}, {"x2", a.x2},
                        {"resolution", a.resolution}};
    report["outputs"] = {{"grid", a.out}};
    report["timings"] = {{"total_seconds", seconds_since(t0)}};
    const fs::path rp = report_path_for(a.report, a.out);
    report["outputs"]["report"] = rp.string();
    write_json(rp, report);
    out << "wrote " << a.resolution * a.resolution << " grid rows to " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Domain adaptation of linear classifiers: training, bounds, model selection"};
    app.name("dalc");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train a DALC model");
    train_cmd->add_option("--source", train_args.source, "Labeled source sample")->required();
    train_cmd->add_option("--target", train_args.target, "Unlabeled target sample")->required();
    train_args.kernel.add_to(train_cmd, true);
    train_cmd->add_option("--B", train_args.B, "Source joint-error weight")
        ->check(CLI::PositiveNumber)
        ->required();
    train_cmd->add_option("--C", train_args.C, "Target disagreement weight (0: source only)")
        ->check(CLI::NonNegativeNumber)
        ->required();
    train_cmd->add_flag("--primal", train_args.primal, "Optimize w directly (linear kernel only)");
    train_args.opt.add_to(train_cmd);
    train_args.data.add_to(train_cmd);
    train_cmd->add_option("--out", train_args.out, "Model file to write")->required();
    train_cmd->add_option("--report", train_args.report, "Run report (default <out>.report.json)");

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "Predict labels with a trained model");
    predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
    predict_cmd->add_option("--data", predict_args.data, "Data to label")->required();
    predict_cmd->add_option("--out", predict_args.out, "Predictions, one +1/-1 per line")
        ->required();
    predict_cmd->add_option("--report", predict_args.report,
                            "Run report (default <out>.report.json)");
    predict_args.data_opt.add_to(predict_cmd);

    BoundsArgs bounds_args;
    auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate generalization bounds for a model");
    bounds_cmd->add_option("--model", bounds_args.model, "Model file")->required();
    bounds_cmd->add_option("--source", bounds_args.source, "Labeled source sample")->required();
    bounds_cmd->add_option("--target", bounds_args.target, "Target sample")->required();
    bounds_cmd->add_option("--b", bounds_args.b, "Catoni constant for the source term")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bounds_cmd->add_option("--c", bounds_args.c, "Catoni constant for the target term")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bounds_cmd->add_option("--delta", bounds_args.delta, "Confidence parameter")
        ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0))
        ->capture_default_str();
    bounds_cmd->add_option("--beta-inf", bounds_args.beta_inf, "Domain divergence beta_inf")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    bounds_cmd->add_option("--eta", bounds_args.eta, "Target risk mass outside the source support")
        ->check(CLI::Range(0.0, 1.0));
    bounds_cmd->add_option("--outside-mass", bounds_args.outside_mass,
                           "Target mass outside the source support (caps eta)")
        ->check(CLI::Range(0.0, 1.0));
    bounds_cmd->add_option("--q", bounds_args.q, "Order q for the plug-in ideal bound")
        ->check(CLI::PositiveNumber);
    bounds_cmd->add_option("--beta-q", bounds_args.beta_q, "beta_q for the plug-in ideal bound")
        ->check(CLI::NonNegativeNumber);
    bounds_cmd->add_option("--sweep-b", bounds_args.sweep_b, "b grid: lo:hi:n (log) or a,b,...");
    bounds_cmd->add_option("--sweep-c", bounds_args.sweep_c, "c grid: lo:hi:n (log) or a,b,...");
    bounds_cmd->add_option("--out", bounds_args.out, "JSON report (default: stdout)");
    bounds_args.data.add_to(bounds_cmd);

    ReverseCvArgs rcv_args;
    auto* rcv_cmd = app.add_subcommand("reverse-cv", "Select B and C by reverse validation");
    rcv_cmd->add_option("--source", rcv_args.source, "Labeled source sample")->required();
    rcv_cmd->add_option("--target", rcv_args.target, "Unlabeled target sample")->required();
    rcv_args.kernel.add_to(rcv_cmd, true);
    rcv_cmd->add_option("--grid-c", rcv_args.grid_c, "C grid: lo:hi:n (log) or a,b,...")
        ->capture_default_str();
    rcv_cmd->add_option("--grid-b", rcv_args.grid_b, "B grid: lo:hi:n (log) or a,b,...")
        ->capture_default_str();
    rcv_cmd->add_option("--folds", rcv_args.folds, "Source folds")->capture_default_str();
    rcv_cmd->add_option("--seed", rcv_args.seed, "Fold shuffling seed")->capture_default_str();
    rcv_cmd->add_option("--threads", rcv_args.threads, "Grid cells evaluated concurrently")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rcv_cmd->add_flag("--primal", rcv_args.primal, "Optimize w directly (linear kernel only)");
    rcv_args.opt.add_to(rcv_cmd);
    rcv_args.data.add_to(rcv_cmd);
    rcv_cmd->add_option("--out-dir", rcv_args.out_dir, "Output directory")->required();

    MoonsArgs moons_args;
    auto* moons_cmd = app.add_subcommand("moons", "Generate the rotated two-moons task");
    moons_cmd->add_option("--n", moons_args.n, "Points per domain")->capture_default_str();
    moons_cmd->add_option("--noise", moons_args.noise, "Gaussian noise std")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    moons_cmd->add_option("--rotation", moons_args.rotation, "Target rotation in degrees")
        ->capture_default_str();
    moons_cmd->add_option("--seed", moons_args.seed, "Generator seed")->capture_default_str();
    moons_cmd->add_option("--out-dir", moons_args.out_dir, "Output directory")->required();
    moons_cmd->add_flag("--run-experiment", moons_args.run_experiment,
                        "Train DALC and the source-only baseline and report target errors");
    moons_cmd->add_option("--gamma", moons_args.gamma, "RBF width for the experiment")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    moons_cmd->add_option("--B", moons_args.B, "B for the experiment")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    moons_cmd->add_option("--C", moons_args.C, "C for the experiment")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    moons_cmd->add_option("--resolution", moons_args.resolution, "Decision grid resolution")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    moons_args.opt.add_to(moons_cmd);

    BetaQArgs beta_args;
    auto* beta_cmd = app.add_subcommand("beta-q", "Monte-Carlo beta_q on a synthetic family");
    beta_cmd->add_option("--family", beta_args.family, "Distribution family")
        ->check(CLI::IsMember({"two-atom", "discrete", "gaussian"}))
        ->capture_default_str();
    beta_cmd->add_option("--source-probs", beta_args.source_probs, "Discrete source masses")
        ->capture_default_str();
    beta_cmd->add_option("--target-probs", beta_args.target_probs, "Discrete target masses")
        ->capture_default_str();
    beta_cmd->add_option("--shift", beta_args.shift, "Gaussian mean shift, comma separated")
        ->capture_default_str();
    beta_cmd->add_option("--q", beta_args.q, "Order q > 0 or 'inf'")->capture_default_str();
    beta_cmd->add_option("--n", beta_args.n, "Monte-Carlo draws")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    beta_cmd->add_option("--seed", beta_args.seed, "Sampler seed")->capture_default_str();
    beta_cmd->add_option("--eta", beta_args.eta, "Target risk mass outside the source support")
        ->check(CLI::Range(0.0, 1.0));
    beta_cmd->add_option("--outside-mass", beta_args.outside_mass,
                         "Target mass outside the source support (caps eta)")
        ->check(CLI::Range(0.0, 1.0));
    beta_cmd->add_option("--report", beta_args.report, "JSON report (default: stdout)");

    GridArgs grid_args;
    auto* grid_cmd = app.add_subcommand("decision-grid", "Export decision values on a 2-d lattice");
    grid_cmd->add_option("--model", grid_args.model, "Two-dimensional model")->required();
    grid_cmd->add_option("--out", grid_args.out, "CSV output (x1,x2,value)")->required();
    grid_cmd->add_option("--x1", grid_args.x1, "x1 range lo:hi")->capture_default_str();
    grid_cmd->add_option("--x2", grid_args.x2, "x2 range lo:hi")->capture_default_str();
    grid_cmd->add_option("--resolution", grid_args.resolution, "Points per axis")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    grid_cmd->add_option("--report", grid_args.report, "Run report (default <out>.report.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*train_cmd)
            return cmd_train(train_args, base_report("train", argc, argv), out);
        if (*predict_cmd)
            return cmd_predict(predict_args, base_report("predict", argc, argv), out);
        if (*bounds_cmd)
            return cmd_bounds(bounds_args, base_report("bounds", argc, argv), out);
        if (*rcv_cmd)
            return cmd_reverse_cv(rcv_args, base_report("reverse-cv", argc, argv), out);
        if (*moons_cmd)
            return cmd_moons(moons_args, base_report("moons", argc, argv), out);
        if (*beta_cmd)
            return cmd_beta_q(beta_args, base_report("beta-q", argc, argv), out);
        if (*grid_cmd)
            return cmd_decision_grid(grid_args, base_report("decision-grid", argc, argv), out);
    } catch (const UsageError& e) {
        err << "dalc: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "dalc: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace dalc::cli
