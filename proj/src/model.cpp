#include "dalc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dalc {

using nlohmann::json;

DalcModel DalcModel::primal(std::vector<double> w, DalcHyperparams hp, OptimizerTrace trace,
                            std::size_t m_s, std::size_t m_t) {
    for (double v : w)
        if (!std::isfinite(v))
            throw std::invalid_argument("DalcModel: weights must be finite");
    DalcModel m;
    m.form_ = ModelForm::Primal;
    m.weights_ = std::move(w);
    m.kernel_ = KernelSpec::linear();
    m.hp_ = hp;
    m.trace_ = std::move(trace);
    m.m_s_ = m_s;
    m.m_t_ = m_t;
    return m;
}

DalcModel DalcModel::dual(std::vector<double> alpha, Dataset support, KernelSpec kernel,
                          DalcHyperparams hp, OptimizerTrace trace, std::size_t m_s,
                          std::size_t m_t) {
    kernel.validate();
    if (support.size() != m_s + m_t)
        throw std::invalid_argument("DalcModel: dual form needs exactly m_s + m_t support points");
    if (alpha.size() != support.size())
        throw std::invalid_argument("DalcModel: one dual weight per support point");
    for (double v : alpha)
        if (!std::isfinite(v))
            throw std::invalid_argument("DalcModel: weights must be finite");
    DalcModel m;
    m.form_ = ModelForm::Dual;
    m.weights_ = std::move(alpha);
    m.support_ = std::move(support);
    m.kernel_ = kernel;
    m.hp_ = hp;
    m.trace_ = std::move(trace);
    m.m_s_ = m_s;
    m.m_t_ = m_t;
    return m;
}

std::size_t DalcModel::dim() const {
    return form_ == ModelForm::Primal ? weights_.size() : support_.dim();
}

void DalcModel::check_dim(std::size_t extent) const {
    if (extent > dim())
        throw std::invalid_argument("DalcModel: input dimension " + std::to_string(extent) +
                                    " exceeds the model dimension " + std::to_string(dim()));
}

double DalcModel::decision_value(const SparseVector& x) const {
    check_dim(x.extent());
    if (form_ == ModelForm::Primal)
        return dot(weights_, x);
    const double x_sq = x.squared_norm();
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] != 0.0)
            s += weights_[i] *
                 kernel_eval(kernel_, support_.point(i), support_.squared_norm(i), x, x_sq);
    }
    return s;
}

double DalcModel::decision_value(std::span<const double> x) const {
    if (x.size() != dim())
        throw std::invalid_argument("DalcModel: input has dimension " + std::to_string(x.size()) +
                                    ", model expects " + std::to_string(dim()));
    return decision_value(SparseVector::from_dense(x));
}

double DalcModel::normalized_margin(const SparseVector& x) const {
    const double self = kernel_eval(kernel_, x, x);
    if (!(self > 0.0))
        throw std::invalid_argument("DalcModel: zero-norm input has no normalized margin");
    return decision_value(x) / std::sqrt(self);
}

std::vector<double> DalcModel::decision_values(const Dataset& data) const {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out[i] = decision_value(data.point(i));
    return out;
}

std::vector<int> DalcModel::predict(const Dataset& data) const {
    std::vector<int> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out[i] = predict(data.point(i));
    return out;
}

double DalcModel::kl() const {
    if (form_ == ModelForm::Primal) {
        double s = 0.0;
        for (double v : weights_)
            s += v * v;
        return 0.5 * s;
    }
    return 0.5 * gram(kernel_, support_).quadratic_form(weights_);
}

DalcModel train(const Dataset& source, const Dataset& target, const KernelSpec& kernel,
                const DalcHyperparams& hp, const OptimizerConfig& opt,
                const TrainOptions& options) {
    kernel.validate();
    hp.validate();
    opt.validate();
    if (source.empty() || target.empty())
        throw std::invalid_argument("train: adaptation needs a nonempty source and target sample");
    if (!source.labeled())
        throw std::invalid_argument("train: source sample must be labeled");

    const std::size_t m_s = source.size(), m_t = target.size();
    const std::size_t d = std::max(source.dim(), target.dim());

    if (options.primal) {
        if (kernel.family != KernelFamily::Linear)
            throw std::invalid_argument("train: the primal form requires the linear kernel");
        const Dataset src = source.with_dim(d), tgt = target.with_dim(d);
        const PrimalObjective objective(src, tgt, hp);
        std::vector<double> start = options.start.value_or(std::vector<double>(d, 0.0));
        if (start.size() != d)
            throw std::invalid_argument("train: primal start must have dimension " +
                                        std::to_string(d));
        auto result = minimize(
            [&](std::span<const double> w, std::span<double> g) {
                return objective.value_and_gradient(w, g);
            },
            std::move(start), opt);
        return DalcModel::primal(std::move(result.point), hp, std::move(result.trace), m_s, m_t);
    }

    Dataset support = concat_features(source, target);
    const GramMatrix K = gram(kernel, support);
    const DualObjective objective(K, source.labels(), m_s, m_t, hp);
    const std::size_t M = m_s + m_t;
    std::vector<double> start =
        options.start.value_or(std::vector<double>(M, 1.0 / static_cast<double>(M)));
    if (start.size() != M)
        throw std::invalid_argument("train: dual start must have dimension " + std::to_string(M));
    auto result = minimize(
        [&](std::span<const double> a, std::span<double> g) {
            return objective.value_and_gradient(a, g);
        },
        std::move(start), opt);
    return DalcModel::dual(std::move(result.point), std::move(support), kernel, hp,
                           std::move(result.trace), m_s, m_t);
}

std::string model_to_json(const DalcModel& model) {
    json j;
    j["format"] = "dalc-model";
    j["version"] = kModelFormatVersion;
    j["form"] = model.form() == ModelForm::Primal ? "primal" : "dual";
    j["kernel"] = {{"family", model.kernel().name()}, {"gamma", model.kernel().gamma}};
    j["hyperparams"] = {{"B", model.hyperparams().B}, {"C", model.hyperparams().C}};
    j["m_s"] = model.source_count();
    j["m_t"] = model.target_count();
    j["dim"] = model.dim();
    j["weights"] = model.weights();
    if (model.form() == ModelForm::Dual) {
        json pts = json::array();
        for (const SparseVector& p : model.support().points())
            pts.push_back({{"indices", p.indices}, {"values", p.values}});
        j["support_points"] = std::move(pts);
    }
    const OptimizerTrace& t = model.trace();
    j["trace"] = {{"iterations", t.iterations},
                  {"converged", t.converged},
                  {"final_gradient_norm", t.final_gradient_norm},
                  {"objective_values", t.objective_values}};
    return j.dump(1);
}

namespace {

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    const std::size_t end = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + end, '\n'));
}

}  // namespace

DalcModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed model file (byte ") + std::to_string(e.byte) +
                             "): " + e.what(),
                         line_of_byte(text, e.byte));
    }
    try {
        if (!j.is_object() || j.value("format", "") != "dalc-model")
            throw ParseError("not a dalc model file", 0);
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw UnsupportedVersionError("unsupported model format version " +
                                          std::to_string(version) + " (this build reads " +
                                          std::to_string(kModelFormatVersion) + ")");
        const KernelSpec kernel = parse_kernel(j.at("kernel").at("family").get<std::string>(),
                                               j.at("kernel").at("gamma").get<double>());
        const DalcHyperparams hp{j.at("hyperparams").at("B").get<double>(),
                                 j.at("hyperparams").at("C").get<double>()};
        OptimizerTrace trace;
        const json& jt = j.at("trace");
        trace.iterations = jt.at("iterations").get<std::size_t>();
        trace.converged = jt.at("converged").get<bool>();
        trace.final_gradient_norm = jt.at("final_gradient_norm").get<double>();
        trace.objective_values = jt.at("objective_values").get<std::vector<double>>();
        const auto m_s = j.at("m_s").get<std::size_t>();
        const auto m_t = j.at("m_t").get<std::size_t>();
        const auto dim = j.at("dim").get<std::size_t>();
        auto weights = j.at("weights").get<std::vector<double>>();
        const std::string form = j.at("form").get<std::string>();
        if (form == "primal") {
            if (weights.size() != dim)
                throw ParseError("primal weight count does not match dim", 0);
            return DalcModel::primal(std::move(weights), hp, std::move(trace), m_s, m_t);
        }
        if (form != "dual")
            throw ParseError("unknown model form '" + form + "'", 0);
        std::vector<SparseVector> pts;
        for (const json& p : j.at("support_points")) {
            SparseVector v;
            v.indices = p.at("indices").get<std::vector<std::uint32_t>>();
            v.values = p.at("values").get<std::vector<double>>();
            pts.push_back(std::move(v));
        }
        Dataset support(std::move(pts), dim, std::nullopt, Role::Source);
        return DalcModel::dual(std::move(weights), std::move(support), kernel, hp,
                               std::move(trace), m_s, m_t);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what(), 0);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid model file: ") + e.what(), 0);
    }
}

void save_model(const DalcModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << model_to_json(model) << '\n';
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

DalcModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return model_from_json(buf.str());
    } catch (const ParseError& e) {
        throw e.prefixed(path.string());
    }
}

}  // namespace dalc
