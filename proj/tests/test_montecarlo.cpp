#include <gtest/gtest.h>

#include <cmath>

#include "chirp2d/errors.hpp"
#include "chirp2d/montecarlo.hpp"
#include "chirp2d/rng.hpp"

using namespace chirp2d;

namespace {

const ChirpComponent kCaseI{2.0, 3.0, 1.5, 0.5, 2.5, 0.75};

McPlan small_plan()
{
    McPlan plan;
    plan.spec = {{kCaseI}, {}};
    plan.sizes = {{12, 12}, {14, 10}};
    plan.sigmas = {0.0, 0.5};
    plan.replications = 6;
    plan.base_seed = 77;
    return plan;
}

} // namespace

TEST(McPlan, Validation)
{
    McPlan p = small_plan();
    p.replications = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan();
    p.sizes.clear();
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan();
    p.sigmas = {-0.1};
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = small_plan();
    p.spec.components.clear();
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(McRun, NoiselessSingleReplication)
{
    McPlan plan;
    plan.spec = {{kCaseI}, {}};
    plan.sizes = {{25, 25}};
    plan.sigmas = {0.0};
    plan.replications = 1;
    const McReport r = run(plan);
    ASSERT_EQ(r.rows.size(), 6u);
    for (const McRow& row : r.rows) {
        EXPECT_LT(std::abs(row.bias), 1e-6) << row.parameter;
        if (row.parameter != "A" && row.parameter != "B") {
            EXPECT_LT(row.mse, 1e-12) << row.parameter;
        }
        EXPECT_EQ(row.avar, 0.0);
        EXPECT_EQ(row.failures, 0);
    }
}

TEST(McRun, LayoutAndAvarAtTruth)
{
    const McPlan plan = small_plan();
    const McReport r = run(plan);
    ASSERT_EQ(r.rows.size(), 2u * 2u * 6u);
    const McRow& row = r.rows[6 + 2]; // size 0, sigma 0.5, alpha
    EXPECT_EQ(row.size_m, 12);
    EXPECT_EQ(row.sigma, 0.5);
    EXPECT_EQ(row.parameter, "alpha");
    EXPECT_EQ(row.component, 1);
    EXPECT_DOUBLE_EQ(row.avar, asymptotic_covariance(kCaseI, 0.25, 12, 12).var_alpha);
    EXPECT_EQ(r.rows[12].size_n, 10);
}

TEST(McRun, ReproducibleAndIndependentOfThreading)
{
    const McPlan plan = small_plan();
    const McReport a = run(plan);
    const McReport b = run(plan);
    EXPECT_EQ(a, b);
    EXPECT_EQ(render(a, ReportFormat::csv), render(b, ReportFormat::csv));
    McPlan other = plan;
    other.base_seed = 78;
    EXPECT_NE(render(run(other), ReportFormat::csv), render(a, ReportFormat::csv));
}

// Statistics recomputed from independently regenerated replications.
TEST(McRun, StatisticsMatchIndependentReplay)
{
    McPlan plan = small_plan();
    plan.sizes = {{12, 12}};
    plan.sigmas = {0.5};
    const McReport r = run(plan);
    std::vector<double> alpha;
    for (int rep = 0; rep < plan.replications; ++rep) {
        ModelSpec spec = plan.spec;
        spec.noise = {0.5, derive_seed(plan.base_seed, {0, 0, static_cast<std::uint64_t>(rep)})};
        alpha.push_back(sequential_estimate(synthesize(spec, 12, 12), {}).components[0].component.alpha);
    }
    double mean = 0;
    for (double a : alpha) {
        mean += a;
    }
    mean /= alpha.size();
    double var = 0;
    double mse = 0;
    for (double a : alpha) {
        var += (a - mean) * (a - mean);
        mse += (a - 1.5) * (a - 1.5);
    }
    var /= alpha.size();
    mse /= alpha.size();
    const McRow& row = r.rows[2];
    ASSERT_EQ(row.parameter, "alpha");
    EXPECT_NEAR(row.average, mean, 1e-14);
    EXPECT_NEAR(row.mse, mse, 1e-12 * mse);
    // mse = bias^2 + variance
    EXPECT_NEAR(row.mse, row.bias * row.bias + var, 1e-12 * row.mse);
    for (const McRow& x : r.rows) {
        EXPECT_GE(x.mse * (1 + 1e-12), x.bias * x.bias);
    }
}

TEST(McRun, InvalidConfigRejectedUpFront)
{
    EstimatorConfig cfg;
    cfg.refine.max_iters = 0;
    EXPECT_THROW((void)run(small_plan(), cfg), std::invalid_argument);
}

TEST(McRun, FailuresAreCountedNotFatal)
{
    McPlan plan = small_plan();
    plan.sizes = {{12, 12}};
    plan.sigmas = {0.1};
    plan.replications = 5;
    // Fail on every grid whose first entry is below its truth-only value.
    const double clean = render({kCaseI}, 12, 12).at(1, 1);
    int expected_failures = 0;
    for (int rep = 0; rep < 5; ++rep) {
        ModelSpec spec = plan.spec;
        spec.noise = {0.1, replication_seed(plan.base_seed, 0, 0, rep)};
        expected_failures += synthesize(spec, 12, 12).at(1, 1) < clean ? 1 : 0;
    }
    ASSERT_GT(expected_failures, 0);
    ASSERT_LT(expected_failures, 5);
    const McReport r = run(plan, [&](const SignalGrid& g) -> std::vector<ChirpComponent> {
        if (g.at(1, 1) < clean) {
            throw std::runtime_error("synthetic failure");
        }
        return {kCaseI};
    });
    for (const McRow& row : r.rows) {
        EXPECT_EQ(row.failures, expected_failures);
        EXPECT_EQ(row.bias, 0.0);
    }
    const McReport all = run(plan, [](const SignalGrid&) -> std::vector<ChirpComponent> { throw std::runtime_error("x"); });
    EXPECT_EQ(all.rows[0].failures, 5);
    EXPECT_TRUE(std::isnan(all.rows[0].average));
}

TEST(McRender, CsvRoundTrip)
{
    const McReport r = run(small_plan());
    const std::string csv = render(r, ReportFormat::csv);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "size_m,size_n,sigma,component,parameter,average,bias,mse,avar,failures");
    EXPECT_EQ(parse_csv(csv), r);
}

TEST(McRender, CsvRejectsGarbage)
{
    EXPECT_THROW((void)parse_csv("nope\n"), FormatError);
    const std::string header = "size_m,size_n,sigma,component,parameter,average,bias,mse,avar,failures\n";
    EXPECT_THROW((void)parse_csv(header + "1,2,3\n"), FormatError);
    EXPECT_THROW((void)parse_csv(header + "x,2,0.1,1,alpha,1,1,1,1,0\n"), FormatError);
}

TEST(McRender, MarkdownLayout)
{
    const McReport r = run(small_plan());
    const std::string md = render(r, ReportFormat::markdown);
    EXPECT_NE(md.find("### M = 12, N = 12, component 1"), std::string::npos);
    EXPECT_NE(md.find("| sigma | | A | B | alpha | beta | gamma | delta |"), std::string::npos);
    EXPECT_NE(md.find("| 0.50 | Avg |"), std::string::npos);
    EXPECT_NE(md.find("|  | Avar |"), std::string::npos);
    EXPECT_EQ(render(McReport{}, ReportFormat::markdown).find("empty") != std::string::npos, true);
}

TEST(McRender, MarkdownAnnotatesFailures)
{
    McReport r;
    McRow row;
    row.size_m = row.size_n = 10;
    row.sigma = 1.0;
    row.parameter = "alpha";
    row.average = row.bias = row.mse = std::nan("");
    row.avar = 1e-3;
    row.failures = 5;
    r.rows.push_back(row);
    const std::string md = render(r, ReportFormat::markdown);
    EXPECT_NE(md.find("5 failed replication"), std::string::npos);
    EXPECT_NE(md.find("n/a"), std::string::npos);
}

TEST(McRender, JsonFields)
{
    const std::string json = render(run(small_plan()), ReportFormat::json);
    for (const char* key : {"\"size_m\"", "\"size_n\"", "\"sigma\"", "\"component\"", "\"parameter\"", "\"average\"",
                            "\"bias\"", "\"mse\"", "\"avar\"", "\"failures\""}) {
        EXPECT_NE(json.find(key), std::string::npos) << key;
    }
}
