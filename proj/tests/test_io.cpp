#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "lotama/errors.hpp"
#include "lotama/io.hpp"

using namespace lotama;

TEST_CASE("flat config parsing: comments, blanks, trimming") {
    auto kv = parse_flat_config("# heading\n\n  family = uniform-additive  \nm=2\n n =3\n");
    CHECK(kv.at("family") == "uniform-additive");
    CHECK(kv.at("m") == "2");
    CHECK(kv.at("n") == "3");
}

TEST_CASE("flat config parsing rejects malformed lines") {
    CHECK_THROWS_AS(parse_flat_config("just a line\n"), ConfigError);
    CHECK_THROWS_AS(parse_flat_config("= nope\n"), ConfigError);
    CHECK_THROWS_AS(parse_flat_config("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("experiment config rejects unknown keys") {
    auto kv = parse_flat_config("family = uniform-additive\nm = 2\nn = 2\nbogus_key = 1\n");
    CHECK_THROWS_WITH_AS(experiment_config_from_map(kv), doctest::Contains("bogus_key"),
                         ConfigError);
}

TEST_CASE("experiment config applies profile defaults and overrides") {
    auto desk = experiment_config_from_map(parse_flat_config("profile = desk\n"));
    CHECK(desk.train.steps == 3000);
    CHECK(desk.train.batch_size == 4096);
    CHECK(desk.train.menu_size == 1024);

    auto paper = experiment_config_from_map(parse_flat_config("profile = paper\n"));
    CHECK(paper.train.steps == 9000);
    CHECK(paper.train.batch_size == 32768);
    CHECK(paper.train.menu_size == 4096);

    auto mixed = experiment_config_from_map(
        parse_flat_config("profile = paper\nsteps = 123\nmenu_size = 64\n"));
    CHECK(mixed.train.steps == 123);
    CHECK(mixed.train.menu_size == 64);
    CHECK(mixed.train.batch_size == 32768);

    CHECK_THROWS_AS(experiment_config_from_map(parse_flat_config("profile = laptop\n")),
                    ConfigError);
}

TEST_CASE("experiment config types are validated") {
    CHECK_THROWS_AS(experiment_config_from_map(parse_flat_config("m = two\n")), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_map(parse_flat_config("learning_rate = fast\n")),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_map(parse_flat_config("freeze_weights = maybe\n")),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_map(parse_flat_config("family = gaussian\n")),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_map(parse_flat_config("feasibility = matroid\n")),
                    ConfigError);
}

TEST_CASE("experiment config wires the discrete support CSV") {
    const std::string csv = "/tmp/lotama_io_support.csv";
    {
        std::ofstream out(csv);
        out << "v_1,v_2,prob\n0.1,0.2,1.0\n";
    }
    auto cfg = experiment_config_from_map(parse_flat_config(
        "family = discrete-points\nm = 2\nn = 2\nsupport_csv = " + csv + "\n"));
    REQUIRE(cfg.distribution.discrete.points.size() == 1);
    CHECK(cfg.distribution.discrete.points[0][1] == 0.2);

    // support_csv without the discrete family is a config error
    CHECK_THROWS_AS(experiment_config_from_map(parse_flat_config(
                        "family = uniform-additive\nsupport_csv = " + csv + "\n")),
                    ConfigError);
    std::remove(csv.c_str());
}

TEST_CASE("config file loading reports missing files") {
    CHECK_THROWS_AS(load_experiment_config("/tmp/definitely_missing_lotama.cfg"), ConfigError);
}

TEST_CASE("seed flows into both train config and distribution") {
    auto cfg = experiment_config_from_map(parse_flat_config("seed = 99\n"));
    CHECK(cfg.train.seed == 99);
    CHECK(cfg.distribution.seed == 99);
}
