#include "chirp2d/serialization.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "chirp2d/errors.hpp"

namespace chirp2d {

using json = nlohmann::ordered_json;

namespace {

json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json component_json(const ChirpComponent& c)
{
    return {{"A", c.A}, {"B", c.B}, {"alpha", c.alpha}, {"beta", c.beta}, {"gamma", c.gamma}, {"delta", c.delta}};
}

ChirpComponent component_from(const json& j)
{
    return {j.at("A").get<double>(),     j.at("B").get<double>(),     j.at("alpha").get<double>(),
            j.at("beta").get<double>(),  j.at("gamma").get<double>(), j.at("delta").get<double>()};
}

json model_json(const ModelSpec& spec)
{
    json comps = json::array();
    for (const auto& c : spec.components) {
        comps.push_back(component_json(c));
    }
    return {{"components", comps}, {"noise", {{"sigma", spec.noise.sigma}, {"seed", spec.noise.seed}}}};
}

ModelSpec model_from(const json& j)
{
    ModelSpec spec;
    for (const auto& c : j.at("components")) {
        spec.components.push_back(component_from(c));
    }
    if (j.contains("noise")) {
        const json& noise = j.at("noise");
        spec.noise.sigma = noise.value("sigma", 0.0);
        spec.noise.seed = noise.value("seed", std::uint64_t{0});
        if (noise.value("distribution", std::string("gaussian")) != "gaussian") {
            throw FormatError("model document: only gaussian noise is supported");
        }
    }
    return spec;
}

json report_json(const OptimumReport& r)
{
    return {{"freq", r.pair.freq},
            {"rate", r.pair.rate},
            {"value", real(r.value)},
            {"iterations", r.iterations},
            {"evaluations", r.evaluations},
            {"converged", r.converged},
            {"flat", r.flat},
            {"grid_freq", r.grid_cell.freq},
            {"grid_rate", r.grid_cell.rate},
            {"grid_value", real(r.grid_value)},
            {"note", r.note}};
}

template <class F>
auto parse(std::string_view text, const char* what, F&& build)
{
    try {
        return build(json::parse(text));
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

} // namespace

std::string model_to_json(const ModelSpec& spec) { return model_json(spec).dump(2) + "\n"; }

ModelSpec model_from_json(std::string_view text)
{
    return parse(text, "model document", [](const json& j) { return model_from(j); });
}

std::string fit_to_json(const FitResult& fit)
{
    json comps = json::array();
    for (const auto& c : fit.components) {
        json se = json::object();
        for (std::size_t k = 0; k < 6; ++k) {
            se[std::string(kParameterNames[k])] = real(c.se[k]);
        }
        json entry = component_json(c.component);
        entry["se"] = se;
        entry["power"] = c.power;
        entry["flat"] = c.flat;
        entry["likely_overfit"] = c.likely_overfit;
        entry["exceeds_bound"] = c.exceeds_bound;
        comps.push_back(entry);
    }
    json stages = json::array();
    for (const auto& t : fit.trace) {
        stages.push_back({{"columns", report_json(t.columns)},
                          {"rows", report_json(t.rows)},
                          {"column_mirrored", t.column_mirrored},
                          {"row_mirrored", t.row_mirrored}});
    }
    const json doc = {{"components", comps},
                      {"sigma2_hat", real(fit.sigma2_hat)},
                      {"size", {fit.residual.rows(), fit.residual.cols()}},
                      {"stages", stages}};
    return doc.dump(2) + "\n";
}

std::string plan_to_json(const McPlan& plan)
{
    json sizes = json::array();
    for (const auto& [m, n] : plan.sizes) {
        sizes.push_back({m, n});
    }
    const json doc = {{"model", model_json(plan.spec)},
                      {"sizes", sizes},
                      {"sigmas", plan.sigmas},
                      {"replications", plan.replications},
                      {"base_seed", plan.base_seed},
                      {"estimator", plan.estimator == EstimatorKind::proposed ? "proposed" : "periodogram"}};
    return doc.dump(2) + "\n";
}

McPlan plan_from_json(std::string_view text)
{
    return parse(text, "Monte-Carlo plan", [](const json& j) {
        McPlan plan;
        plan.spec = model_from(j.at("model"));
        for (const auto& s : j.at("sizes")) {
            if (!s.is_array() || s.size() != 2) {
                throw FormatError("Monte-Carlo plan: each size must be [M, N]");
            }
            plan.sizes.emplace_back(s[0].get<Index>(), s[1].get<Index>());
        }
        plan.sigmas = j.at("sigmas").get<std::vector<double>>();
        plan.replications = j.value("replications", plan.replications);
        plan.base_seed = j.value("base_seed", plan.base_seed);
        const std::string est = j.value("estimator", std::string("proposed"));
        if (est == "proposed") {
            plan.estimator = EstimatorKind::proposed;
        } else if (est == "periodogram") {
            plan.estimator = EstimatorKind::periodogram;
        } else {
            throw FormatError("Monte-Carlo plan: unknown estimator '" + est + "'");
        }
        return plan;
    });
}

} // namespace chirp2d
