#include <doctest.h>

#include <sstream>

#include "coalflow/io.hpp"
#include "coalflow/verify.hpp"
#include "support.hpp"

using namespace coalflow;
using namespace testing_support;

TEST_SUITE("io") {
    TEST_CASE("site lists") {
        CHECK(parse_sites("0:0,1:-1") == std::vector<Site>{{0, 0}, {1, -1}});
        CHECK(parse_sites("2:+2") == std::vector<Site>{{2, 2}});
        CHECK(parse_sites("").empty());
        CHECK_THROWS_AS(parse_sites("0"), std::invalid_argument);
        CHECK_THROWS_AS(parse_sites("0:0,"), std::invalid_argument);
        CHECK_THROWS_AS(parse_sites("a:1"), std::invalid_argument);
        CHECK_THROWS_AS(parse_sites("1:1x"), std::invalid_argument);
    }

    TEST_CASE("exact decimals") {
        CHECK(parse_rational("0.025") == q(1, 40));
        CHECK(parse_rational("0.25") == q(1, 4));
        CHECK(parse_rational("025") == 25);
        CHECK(parse_rational("1/4") == q(1, 4));
        CHECK(parse_rational("2/8") == q(1, 4));
        CHECK(parse_rational("3e-2") == q(3, 100));
        CHECK(parse_rational("1.5E1") == 15);
        CHECK(parse_rational("-.5") == q(-1, 2));
        CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
        CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
        CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
        CHECK_THROWS_AS(parse_rational("0.1.2"), std::invalid_argument);
    }

    TEST_CASE("spectral set JSON") {
        std::vector<Site> sites{{0, 0}, {1, -1}};
        auto j = spectral_set_to_json(sites, coefficient(sites, 2));
        CHECK(j.dump() == R"({"n":2,"sites":[[0,0],[1,-1]],"d":"-1/2^1","weight":0.125})");
        SampleRecord record{3, SpectralSet::make(sites, 2)};
        CHECK(sample_to_json(record).dump() == R"({"index":3,"R":[0,1],"S":[[0,0],[1,-1]]})");
    }

    TEST_CASE("manifest") {
        RunManifest m;
        m.command = "noise";
        m.params = {{"n", 3}};
        m.seed = 17;
        auto j = m.to_json();
        CHECK(j["timestamp"].is_null());
        CHECK(j["version"] == kVersion);
        m.timestamp = "2026-01-01T00:00:00Z";
        CHECK(m.to_json()["timestamp"] == "2026-01-01T00:00:00Z");

        std::ostringstream out;
        write_csv_preamble(out, m, {{"n", "3"}});
        CHECK(out.str().rfind("# n=3\n# manifest={\"command\":\"noise\"", 0) == 0);
    }

    TEST_CASE("transform dumps round trip") {
        for (int n = 1; n <= 4; ++n) {
            auto t = brute_force_transform(n);
            std::stringstream buffer;
            write_transform_binary(buffer, t);
            auto back = read_transform_binary(buffer);
            CHECK(back.n == n);
            CHECK(back.raw == t.raw);
            auto j = transform_to_json(t);
            CHECK(j["d"].size() == t.size());
            CHECK(j["sites"].size() == static_cast<std::size_t>(index_set_size(n)));
        }
        CHECK_THROWS_AS(transform_to_json(brute_force_transform(5)), std::invalid_argument);

        std::stringstream bad("XXXX");
        CHECK_THROWS(read_transform_binary(bad));
        std::stringstream buffer;
        write_transform_binary(buffer, brute_force_transform(2));
        auto truncated = buffer.str().substr(0, buffer.str().size() - 3);
        std::stringstream cut(truncated);
        CHECK_THROWS(read_transform_binary(cut));
    }

    TEST_CASE("doubles round trip through text") {
        for (double v : {0.1, 1.0 / 3.0, 0.7522809871314701, 1e-300, -2.5}) CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_SUITE("verify") {
    TEST_CASE("certification passes for small horizons") {
        for (int n = 1; n <= 5; ++n) {
            VerifyOptions options;
            options.n = n;
            for (auto const& r : run_certification(options)) CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);
        }
        VerifyOptions no_oracle;
        no_oracle.n = 8;
        no_oracle.oracle = false;
        for (auto const& r : run_certification(no_oracle)) CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);
    }

    TEST_CASE("bounds are enforced") {
        VerifyOptions big;
        big.n = 9;
        big.oracle = false;
        CHECK_THROWS_AS(run_certification(big), std::invalid_argument);
        VerifyOptions oracle;
        oracle.n = 7;
        CHECK_THROWS_AS(run_certification(oracle), std::invalid_argument);
        VerifyOptions zero;
        zero.n = 0;
        CHECK_THROWS_AS(run_certification(zero), std::invalid_argument);
    }

    TEST_CASE("a corrupted table is caught") {
        auto t = brute_force_transform(3);
        t.raw[mask_of_sites(std::vector<Site>{{1, 1}, {2, 0}})] += 2;
        CHECK_FALSE(check_oracle_matches_formula(t).passed);
        CHECK_FALSE(check_parseval_oracle(t).passed);
    }
}
