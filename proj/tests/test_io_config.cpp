#include "support.hpp"

#include "ucm/config.hpp"
#include "ucm/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

using namespace ucm;
using doctest::Approx;

namespace {

const Parameters kP = Parameters::make(1.0, 1.4, 1.0, 1.0);

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("double formatting round-trips") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int k = 0; k < 2000; ++k) {
        const double x = std::ldexp(mant(gen), expo(gen));
        CHECK(same_bits(parse_double(format_double(x)), x));
    }
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(std::isnan(parse_double("nan")));
    CHECK(parse_double("-inf") == -INFINITY);
    CHECK(parse_double("+2.5") == 2.5);
    CHECK(format_double(0.1) == "0.1");
    CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("1.0x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("initial data survive a file round trip bit for bit") {
    ProfileSpec spec;
    spec.delta_A = 0.1;
    const auto data = build_initial_state(spec, kP, grid_for_spec(spec, 6.0));
    ucm::testing::TempDir dir("io");
    write_json_file(dir / "d.json", initial_data_to_json(data, kP));
    const auto back = initial_data_from_json(read_json_file(dir / "d.json"));
    CHECK(back.params == kP);
    CHECK(back.data.grid == data.grid);
    CHECK(back.data.R == data.R);
    REQUIRE(back.data.u0.size() == data.u0.size());
    for (std::size_t i = 0; i < data.u0.size(); ++i) {
        CHECK(same_bits(back.data.u0[i], data.u0[i]));
        CHECK(same_bits(back.data.A0_t[i], data.A0_t[i]));
    }
    CHECK(same_bits(back.data.W0, data.W0));
    REQUIRE(back.data.profile);
    CHECK(back.data.profile->delta_A == 0.1);

    auto j = initial_data_to_json(data, kP);
    j["summary"]["W0"] = data.W0 * 2.0;
    CHECK_THROWS(initial_data_from_json(j));
    j = initial_data_to_json(data, kP);
    j["format"] = "something-else";
    CHECK_THROWS(initial_data_from_json(j));
}

TEST_CASE("checkpoints keep the tracked stress") {
    auto s = RadialState::from_initial(ucm::testing::make_pulse(RadialGrid::covering(5.0, 32), kP), kP, true);
    s.t = 0.125;
    const auto back = checkpoint_from_json(checkpoint_to_json(s, kP, 2.0));
    CHECK(back.R == 2.0);
    CHECK(back.state.t == 0.125);
    REQUIRE(back.state.tracks_T_form());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(same_bits(back.state.mom[i], s.mom[i]));
        CHECK(same_bits(back.state.T_t[i], s.T_t[i]));
    }
}

TEST_CASE("sha256 of a known message") {
    ucm::testing::TempDir dir("sha");
    write_text_file(dir / "abc", "abc");
    CHECK(sha256_file(dir / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_THROWS_AS(sha256_file(dir / "missing"), IoError);
    CHECK_THROWS_AS(read_text_file(dir / "missing"), IoError);
}

TEST_CASE("key-value parsing") {
    const auto kv = KeyValueConfig::parse("# header\n params.gamma = 2 # trailing\n\nsolver.t_end=0.5\r\n");
    CHECK(kv.get("params.gamma") == "2");
    CHECK(kv.get_double("solver.t_end", 0.0) == 0.5);
    CHECK(kv.get_double("solver.cfl", 0.3) == 0.3);
    CHECK_FALSE(kv.get("nothing"));
    CHECK(kv.dump() == "params.gamma = 2\nsolver.t_end = 0.5\n");
    CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("just words\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse(" = 3\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("x = one\n").get_double("x", 0.0), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("x = maybe\n").get_bool("x", false), ConfigError);
}

TEST_CASE("experiment configuration") {
    const auto c = resolve_config(KeyValueConfig::parse("params.lambda = 0.5\nprofile.L = auto\nprofile.R = auto\n"
                                                        "sigma_est = 0.05\nsolver.t_end = 0.2\n"));
    CHECK(c.params.lambda() == 0.5);
    CHECK(c.L_auto);
    CHECK(c.sigma_est() == 0.05);
    const auto spec = resolve_profile(c);
    CHECK(spec.L == choose_L_R(c.params, 0.05, c.profile).L);

    const auto d = resolve_config(KeyValueConfig{});
    CHECK(d.sigma_est() == Approx(default_sigma_est(d.params)));
    const auto g = d.grid(d.profile);
    CHECK(g.dr == Approx(d.profile.mollifier_width / 16.0));
    CHECK(g.r_max() >= d.profile.R + d.sigma_est() * d.t_end + 1.0 - 1e-12);
    CHECK(d.run_config().sigma_est == d.sigma_est());

    auto bad = [](const char* text) { return resolve_config(KeyValueConfig::parse(text)); };
    CHECK_THROWS_AS(bad("params.gama = 2\n"), ConfigError);
    CHECK_THROWS_AS(bad("params.gamma = 1\n"), ConfigError);
    CHECK_THROWS_AS(bad("profile.L = auto\n"), ConfigError);
    CHECK_THROWS_AS(bad("solver.n_cells = 10.5\n"), ConfigError);
    CHECK_THROWS_AS(bad("solver.cfl = 2\n"), ConfigError);
    CHECK_THROWS_AS(bad("solver.n_cells = 100\nsolver.dr = 0.1\nsolver.r_max = 10\n"), ConfigError);
    CHECK_THROWS_AS(bad("bound.U0 = 1\n"), ConfigError);
    CHECK_THROWS_AS(bad("profile.kind = sphere\n"), ConfigError);
    CHECK_THROWS_AS(bad("sigma_est = -1\n"), ConfigError);
    CHECK_NOTHROW(bad("bound.U0 = 1\nbound.c2 = 1\nbound.c3 = 8\n"));
}
