#include <gtest/gtest.h>

#include "confspace/experiment/config.hpp"
#include "confspace/experiment/report.hpp"

using namespace confspace;
using namespace confspace::experiment;

namespace {

json minimal() { return json{{"schema_version", 1}}; }

} // namespace

TEST(Config, DefaultsFromMinimalDocument) {
    const auto c = parse_config(minimal());
    EXPECT_EQ(c.lattice.n, 2);
    EXPECT_EQ(c.boson.cutoff, 4);
    EXPECT_EQ(c.output.format, "csv");
}

TEST(Config, DefaultFileLoads) {
    const auto c = load_config(CONFSPACE_DEFAULT_CONFIG);
    EXPECT_EQ(c.schema_version, 1);
    EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, UnknownKeyNamesField) {
    auto doc = minimal();
    doc["lattice"] = {{"n", 2}, {"spasing", 0.5}};
    try {
        parse_config(doc);
        FAIL() << "accepted unknown key";
    } catch (const ConfigurationError& e) {
        EXPECT_NE(std::string(e.what()).find("lattice.spasing"), std::string::npos);
    }
}

TEST(Config, RejectsBadValues) {
    auto doc = minimal();
    doc["lattice"] = {{"n", 1}};
    EXPECT_THROW(parse_config(doc), ConfigurationError);
    doc = minimal();
    doc["lattice"] = {{"spacing", -1.0}};
    EXPECT_THROW(parse_config(doc), ConfigurationError);
    doc = minimal();
    doc["schema_version"] = 7;
    EXPECT_THROW(parse_config(doc), ConfigurationError);
    doc = minimal();
    doc["lattice"] = {{"n", "two"}};
    EXPECT_THROW(parse_config(doc), ConfigurationError);
    EXPECT_THROW(parse_config(json::object()), ConfigurationError);
}

TEST(Config, ResourceRefusalBeforeAllocation) {
    auto doc = minimal();
    doc["limits"] = {{"max_hilbert_dim", 64}};
    const auto c = parse_config(doc);
    EXPECT_THROW(check_resources(c, "car-relations"), ResourceError);
}

TEST(Config, SuiteNames) {
    EXPECT_EQ(resolve_suites("all").size(), suite_names().size());
    EXPECT_EQ(resolve_suites("cs-gradient"), std::vector<std::string>{"cs-gradient"});
    EXPECT_THROW(resolve_suites("nope"), ConfigurationError);
}

TEST(Config, HashTracksContent) {
    auto a = parse_config(minimal());
    auto doc = minimal();
    doc["seed"] = 5;
    auto b = parse_config(doc);
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a), config_hash(parse_config(minimal())));
}

TEST(Report, ShortestRoundTrip) {
    EXPECT_EQ(detail::format_double(0.5), "0.5");
    EXPECT_EQ(detail::format_double(0.1), "0.1");
    const double x = 1.0 / 3.0;
    EXPECT_EQ(std::strtod(detail::format_double(x).c_str(), nullptr), x);
    EXPECT_EQ(detail::format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Report, FailedCountsOnlyAsserted) {
    Report r;
    r.checks.push_back({"s", "a", "", 1.0, "<", 0.5, true});
    r.checks.push_back({"s", "b", "", 1.0, "<", 0.5, false});
    r.checks.push_back({"s", "c", "", 1.0, ">", 0.5, true});
    EXPECT_EQ(r.failed(), 1);
    EXPECT_EQ(r.asserted(), 2);
}

TEST(Config, OutputDirectoryOutsideHash) {
    auto a = minimal();
    a["output"] = {{"dir", "x"}};
    auto b = minimal();
    b["output"] = {{"dir", "y"}};
    EXPECT_EQ(config_hash(parse_config(a)), config_hash(parse_config(b)));
    EXPECT_EQ(parse_config(b).output.dir, "y");
}
