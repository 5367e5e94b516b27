#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "chirp2d/errors.hpp"
#include "chirp2d/serialization.hpp"

using namespace chirp2d;

TEST(ModelJson, RoundTrip)
{
    const ModelSpec spec{{{2, 3, 1.5, 0.5, 2.5, 0.75}, {0.1, -0.2, 0.3, 0.4, 0.5, 0.6}}, {0.5, 12345678901234ULL}};
    const ModelSpec back = model_from_json(model_to_json(spec));
    EXPECT_EQ(back.components, spec.components);
    EXPECT_EQ(back.noise.sigma, 0.5);
    EXPECT_EQ(back.noise.seed, 12345678901234ULL);
}

TEST(ModelJson, FieldNames)
{
    const auto j = nlohmann::json::parse(model_to_json({{{2, 3, 1.5, 0.5, 2.5, 0.75}}, {0.1, 7}}));
    const auto& c = j.at("components").at(0);
    for (const char* k : {"A", "B", "alpha", "beta", "gamma", "delta"}) {
        EXPECT_TRUE(c.contains(k)) << k;
    }
    EXPECT_EQ(j.at("noise").at("sigma"), 0.1);
    EXPECT_EQ(j.at("noise").at("seed"), 7);
}

TEST(ModelJson, NoiseOptionalAndErrors)
{
    const ModelSpec s = model_from_json(R"({"components":[{"A":1,"B":0,"alpha":1,"beta":1,"gamma":1,"delta":1}]})");
    EXPECT_EQ(s.noise.sigma, 0.0);
    EXPECT_THROW((void)model_from_json("{"), FormatError);
    EXPECT_THROW((void)model_from_json(R"({"components":[{"A":1}]})"), FormatError);
    EXPECT_THROW((void)model_from_json(R"({"components":[{"A":"x","B":0,"alpha":1,"beta":1,"gamma":1,"delta":1}]})"),
                 FormatError);
}

TEST(FitJson, Contents)
{
    const SignalGrid g = synthesize({{{2, 3, 1.5, 0.5, 2.5, 0.75}}, {0.2, 1}}, 16, 16);
    EstimatorConfig cfg;
    cfg.p = 2;
    const FitResult fit = sequential_estimate(g, cfg);
    const auto j = nlohmann::json::parse(fit_to_json(fit));
    ASSERT_EQ(j.at("components").size(), 2u);
    const auto& c = j.at("components").at(0);
    EXPECT_EQ(c.at("alpha").get<double>(), fit.components[0].component.alpha);
    EXPECT_EQ(c.at("se").at("beta").get<double>(), fit.components[0].se[3]);
    EXPECT_EQ(c.at("power").get<double>(), fit.components[0].power);
    EXPECT_TRUE(j.at("components").at(1).at("likely_overfit").get<bool>());
    EXPECT_EQ(j.at("sigma2_hat").get<double>(), fit.sigma2_hat);
    ASSERT_EQ(j.at("stages").size(), 2u);
    EXPECT_TRUE(j.at("stages").at(0).at("columns").contains("iterations"));
    EXPECT_TRUE(j.at("stages").at(0).at("rows").contains("grid_freq"));
}

TEST(PlanJson, RoundTrip)
{
    McPlan plan;
    plan.spec = {{{5, 4, 2.1, 0.1, 1.25, 0.25}, {3, 2, 1.5, 0.5, 1.75, 0.75}}, {}};
    plan.sizes = {{25, 25}, {50, 40}};
    plan.sigmas = {0.1, 0.5, 1.0};
    plan.replications = 100;
    plan.base_seed = 99;
    plan.estimator = EstimatorKind::periodogram;
    const McPlan back = plan_from_json(plan_to_json(plan));
    EXPECT_EQ(back.spec.components, plan.spec.components);
    EXPECT_EQ(back.sizes, plan.sizes);
    EXPECT_EQ(back.sigmas, plan.sigmas);
    EXPECT_EQ(back.replications, 100);
    EXPECT_EQ(back.base_seed, 99u);
    EXPECT_EQ(back.estimator, EstimatorKind::periodogram);
}

TEST(PlanJson, Errors)
{
    const std::string model = R"("model":{"components":[{"A":1,"B":0,"alpha":1,"beta":1,"gamma":1,"delta":1}]})";
    EXPECT_THROW((void)plan_from_json("{" + model + R"(,"sizes":[[25]],"sigmas":[0.1]})"), FormatError);
    EXPECT_THROW((void)plan_from_json("{" + model + R"(,"sizes":[[25,25]],"sigmas":[0.1],"estimator":"lse"})"),
                 FormatError);
    EXPECT_THROW((void)plan_from_json("{" + model + R"(,"sigmas":[0.1]})"), FormatError);
    const McPlan ok = plan_from_json("{" + model + R"(,"sizes":[[25,25]],"sigmas":[0.1]})");
    EXPECT_EQ(ok.replications, 200);
    EXPECT_EQ(ok.estimator, EstimatorKind::proposed);
}
