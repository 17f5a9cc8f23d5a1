#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "gapeq/errors.hpp"
#include "json.hpp"

using namespace gapeq;
using namespace gapeq::cli;

namespace {

const std::filesystem::path kConfigs = GAPEQ_CONFIG_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("gapeq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    RunConfig config(const std::string& file = "default.cfg") {
        RunConfig cfg = load_config(kConfigs / file);
        cfg.out_dir = dir_;
        return cfg;
    }

    int run(const std::string& name, const RunConfig& cfg) {
        std::ostringstream out, err;
        try {
            return run_subcommand(name, cfg, out);
        } catch (...) {
            return exit_code_for(std::current_exception(), err);
        }
    }

    std::filesystem::path dir_;
};

}  // namespace

TEST(Config, ParsesKeysAndComments) {
    const auto cfg = parse_config("# comment\nepsilon = 0.02\nkernel.form = separable\nkernel.coefficients = 0.1, 0.02\n"
                                  "solver.method = anderson\n");
    EXPECT_EQ(cfg.params.epsilon, 0.02);
    EXPECT_EQ(cfg.kernel.coefficients, (std::vector<double>{0.1, 0.02}));
    EXPECT_EQ(cfg.solver.method, IterationMethod::anderson);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(parse_config("epsilom = 0.01\n"), ConfigError);
    EXPECT_THROW(parse_config("epsilon = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("epsilon 0.01\n"), ConfigError);
    RunConfig cfg;
    EXPECT_THROW(apply_override(cfg, "tol.nonsense=1"), ConfigError);
    EXPECT_THROW(apply_override(cfg, "tol.solver"), ConfigError);
}

TEST(Config, OverridesApply) {
    RunConfig cfg;
    apply_override(cfg, "tol.solver=1e-10");
    apply_override(cfg, "grid.nodes=32");
    EXPECT_EQ(cfg.solver.tol, 1e-10);
    EXPECT_EQ(cfg.nodes, 32u);
}

TEST(Config, ValidationCatchesRanges) {
    RunConfig cfg;
    EXPECT_NO_THROW(validate(cfg));
    cfg.nodes = 4;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.kernel.form = "quartic";
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.kernel.u1 = 0.45;  // above the kernel minimum of 0.4 + 0.1 eps^2
    cfg.kernel.u2 = 0.5;
    EXPECT_THROW(build_kernel(cfg), ConfigError);
}

TEST(Config, DigestIgnoresOutputSettings) {
    RunConfig a = parse_config("epsilon = 0.01\n");
    RunConfig b = a;
    b.out_dir = "/elsewhere";
    b.threads = 8;
    b.format = "json";
    EXPECT_EQ(digest(a), digest(b));
    EXPECT_EQ(digest(a).size(), 16u);
    b.params.epsilon = 0.011;
    EXPECT_NE(digest(a), digest(b));
}

TEST(Config, SampledKernelBounds) {
    RunConfig cfg;
    cfg.kernel.u1.reset();
    cfg.kernel.u2.reset();
    const Kernel k = build_kernel(cfg);
    EXPECT_NEAR(k.u1(), 0.4 + 0.1 * 1e-4, 1e-12);
    EXPECT_NEAR(k.u2(), 0.5, 1e-12);
}

TEST_F(CliTest, TcJsonForConstantKernel) {
    ASSERT_EQ(run("tc", config("constant.cfg")), kSuccess);
    const auto j = nlohmann::ordered_json::parse(slurp(dir_ / "tc.json"));
    EXPECT_EQ(j.begin().key(), "config_digest");
    EXPECT_EQ(j["tau1"], j["tau2"]);
    EXPECT_NEAR(j["tc"].get<double>(), j["tau1"].get<double>(), 1e-12);
    const std::string csv = slurp(dir_ / "tc.csv");
    EXPECT_EQ(csv.rfind("# config_digest=", 0), 0u);
}

TEST_F(CliTest, SweepZeroesAboveTc) {
    ASSERT_EQ(run("sweep", config()), kSuccess);
    const auto j = nlohmann::ordered_json::parse(slurp(dir_ / "sweep.json"));
    const double tc = j["tc"].get<double>();
    const auto& temps = j["temperatures"];
    const auto& values = j["values"];
    ASSERT_EQ(temps.size(), values.size());
    bool saw_zero = false, saw_positive = false;
    for (std::size_t i = 0; i < temps.size(); ++i) {
        const bool above = temps[i].get<double>() >= tc;
        for (const auto& v : values[i]) {
            if (above) EXPECT_EQ(v.get<double>(), 0.0);
            else EXPECT_GT(v.get<double>(), 0.0);
        }
        (above ? saw_zero : saw_positive) = true;
    }
    EXPECT_TRUE(saw_zero);
    EXPECT_TRUE(saw_positive);
}

TEST_F(CliTest, OutputIsByteDeterministic) {
    RunConfig cfg = config();
    ASSERT_EQ(run("thermo", cfg), kSuccess);
    const std::string csv1 = slurp(dir_ / "thermo.csv"), json1 = slurp(dir_ / "thermo.json");
    cfg.threads = 4;
    ASSERT_EQ(run("thermo", cfg), kSuccess);
    EXPECT_EQ(csv1, slurp(dir_ / "thermo.csv"));
    EXPECT_EQ(json1, slurp(dir_ / "thermo.json"));
}

TEST_F(CliTest, ExitCodes) {
    RunConfig cfg = config();
    cfg.solver.max_iter = 1;
    EXPECT_EQ(run("solve", cfg), kNonConvergence);

    cfg = config();
    cfg.params.epsilon = 0.9;  // no superconducting phase for this cutoff
    cfg.kernel.u1.reset();
    cfg.kernel.u2.reset();
    EXPECT_EQ(run("tc", cfg), kConfigError);

    EXPECT_EQ(run("frobnicate", config()), kConfigError);

    std::ostringstream err;
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(InvariantViolation("x")), err), kInvariantViolation);
}

TEST_F(CliTest, SimplifiedAndJumpRun) {
    EXPECT_EQ(run("simplified", config()), kSuccess);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "simplified.csv"));
    RunConfig cfg = config();
    cfg.format = "json";
    EXPECT_EQ(run("jump", cfg), kSuccess);
    EXPECT_FALSE(std::filesystem::exists(dir_ / "jump.csv"));
    const auto j = nlohmann::ordered_json::parse(slurp(dir_ / "jump.json"));
    EXPECT_GT(j["delta_cv"].get<double>(), 0.0);
}
