#include "doctest.h"

#include <filesystem>
#include <string>
#include <variant>

#include "opweight/config.hpp"
#include "opweight/error.hpp"

using namespace opweight;

namespace {

const char* kSample = R"(# model point
[model]
J = 1.0
g = 1
h = 0.5   # longitudinal
L = 12

[evolution]
dt = 0.02
t_max = 3
chi_max = 64
lambda2_cutoff = 1e-10

[initial]
theta_deg = 45
phi_deg = 180
operator = "z"
site = 4

[analysis]
omega_star = [10, 11, 12]
omega_perp = [4, 6]
t_window = [0.5, 2.5]

[output]
dir = "runs/a # not a comment"
stride = 5
checkpoint_every = 50

[tempmap]
boundary = "open"

[sweep]
operators = ["x", "y"]
phi_deg = [0, 90]
)";

RunConfig sample() { return apply_config(parse_config(kSample)); }

}  // namespace

TEST_CASE("parser reads sections, comments, strings and arrays") {
    const auto t = parse_config(kSample);
    CHECK(std::get<double>(t.at("model").at("L").value) == 12.0);
    CHECK(std::get<std::string>(t.at("output").at("dir").value) == "runs/a # not a comment");
    const auto& arr = std::get<ConfigValue::Array>(t.at("analysis").at("omega_star").value);
    REQUIRE(arr.size() == 3);
    CHECK(std::get<double>(arr[2]) == 12.0);
    CHECK(std::get<bool>(parse_config("flag = true\n").at("").at("flag").value));
}

TEST_CASE("applied config resolves every field") {
    const auto c = sample();
    CHECK(c.model.L == 12);
    CHECK(c.model.h == 0.5);
    CHECK(c.evolution.dt == 0.02);
    CHECK(c.evolution.trunc.chi_max == 64);
    CHECK(c.evolution.trunc.lambda2_cutoff == 1e-10);
    CHECK(c.op == PauliLabel::z);
    CHECK(c.resolved_site() == 4);
    CHECK(c.resolved_omega_star() == std::vector<std::size_t>{10, 11, 12});
    CHECK(c.omega_perp == std::vector<std::size_t>{4, 6});
    CHECK(c.t_lo == 0.5);
    CHECK(c.resolved_t_hi() == 2.5);
    CHECK(c.out_dir == "runs/a # not a comment");
    CHECK(c.sweep_operators == std::vector<PauliLabel>{PauliLabel::x, PauliLabel::y});
    CHECK(c.thermal_boundary == Boundary::open);
    CHECK(RunConfig{}.thermal_boundary == Boundary::periodic);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("defaults resolve from the chain length") {
    RunConfig c;
    c.model.L = 8;
    CHECK(c.resolved_site() == 4);
    CHECK(c.resolved_omega_max() == 8);
    CHECK(c.resolved_omega_star() == std::vector<std::size_t>{8});
    c.model.L = 30;
    CHECK(c.resolved_omega_star() == std::vector<std::size_t>{12});
    CHECK(c.resolved_t_hi() == c.evolution.t_max);
}

TEST_CASE("malformed input is a config error with a line number") {
    auto kind_of = [](const std::string& text) {
        try {
            apply_config(parse_config(text)).validate();
        } catch (const Error& e) {
            return std::pair{e.kind(), std::string(e.what())};
        }
        return std::pair{ErrorKind::invalid_input, std::string("no error")};
    };
    CHECK(kind_of("[model]\nL = \n").second.find("line 2") != std::string::npos);
    for (const char* bad : {"[model]\nL = 10\nL = 12\n", "[model\n", "[model]\nfoo = 1\n", "[nosuch]\nx = 1\n",
                            "[model]\nL = 2.5\n", "[initial]\noperator = \"w\"\n", "[model]\nJ = \"one\"\n",
                            "[analysis]\nt_window = [1]\n", "[initial]\ntheta_deg = 190\n",
                            "[output]\nstride = 4\ncheckpoint_every = 10\n", "[analysis]\nomega_star = [0]\n",
                            "x = [1, 2\n", "[output]\ndir = \"open\n", "[tempmap]\nboundary = \"ring\"\n"}) {
        CAPTURE(bad);
        CHECK(kind_of(bad).first == ErrorKind::config);
    }
}

TEST_CASE("config hash ignores output placement and worker count") {
    auto a = sample();
    auto b = sample();
    b.out_dir = "elsewhere";
    b.jobs = 7;
    b.checkpoint_every = 0;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.evolution.dt = 0.01;
    CHECK(a.hash() != b.hash());
    b = sample();
    b.theta_deg = 45.000000001;
    CHECK(a.hash() != b.hash());
    CHECK(a.canonical() == sample().canonical());
    b = sample();
    b.thermal_boundary = Boundary::periodic;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("shipped run configs load and validate") {
    std::size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(OPWEIGHT_CONFIG_DIR)) {
        if (entry.path().extension() != ".toml") continue;
        CAPTURE(entry.path().string());
        RunConfig c;
        CHECK_NOTHROW(c = apply_config(load_config(entry.path())));
        CHECK_NOTHROW(c.validate());
        ++count;
    }
    CHECK(count >= 6);
    const auto fig3 = apply_config(load_config(std::filesystem::path(OPWEIGHT_CONFIG_DIR) / "fig3.toml"));
    CHECK(fig3.model.L == 30);
    CHECK(fig3.evolution.trunc.chi_max == 576);
    CHECK(fig3.evolution.dt == 0.01);
    const auto fig7 = apply_config(load_config(std::filesystem::path(OPWEIGHT_CONFIG_DIR) / "fig7.toml"));
    CHECK(fig7.sweep_theta_deg.size() * fig7.sweep_phi_deg.size() == 40);
    CHECK(fig7.resolved_omega_star() == std::vector<std::size_t>{10, 11, 12});
}
