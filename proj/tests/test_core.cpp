#include <sstream>

#include "doctest.h"

#include "divlab/core.hpp"

using namespace divlab;

namespace {

SimilarityMatrix parse(const std::string& text) {
    std::istringstream in(text);
    return parse_similarity_csv(in);
}

}  // namespace

TEST_CASE("platform set rejects empty and duplicate names") {
    CHECK_THROWS_AS(PlatformSet({}), ValidationError);
    CHECK_THROWS_AS((PlatformSet({"A", ""})), ValidationError);
    CHECK_THROWS_AS((PlatformSet({"A", "B", "A"})), ValidationError);

    PlatformSet set({"A", "B"});
    CHECK(set.index_of("B") == 1);
    CHECK_FALSE(set.find("C").has_value());
    CHECK_THROWS_AS(set.index_of("C"), ValidationError);
    CHECK(PlatformSet::numbered(3).name(2) == "P2");
}

TEST_CASE("bundled fixture loads") {
    auto sim = load_similarity_matrix(DIVLAB_FIXTURE_DIR "/moss_5platform.csv");
    REQUIRE(sim.size() == 5);
    const auto& p = sim.platforms();
    CHECK(sim.similarity(p.index_of("CentOS"), p.index_of("Fedora")) == 0.6645);
    CHECK(sim.similarity(p.index_of("FreeBSD"), p.index_of("CentOS")) == 0.0368);
    CHECK(sim.distance(0, 0) == 0.0);
}

TEST_CASE("single platform file") {
    auto sim = parse("A\n1.0\n");
    CHECK(sim.size() == 1);
    CHECK(sim.similarity(0, 0) == 1.0);
}

TEST_CASE("asymmetric file is rejected") {
    CHECK_THROWS_AS((parse("A,B\n1.0,0.5\n0.6,1.0\n")), ValidationError);
}

TEST_CASE("malformed files") {
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS((parse("A,B\n1.0,0.5\n")), ParseError);
    CHECK_THROWS_AS((parse("A,B\n1.0,x\n0.5,1.0\n")), ParseError);
    CHECK_THROWS_AS((parse("A,B\n1.0,0.5\n0.5,1.0\n1,1\n")), ParseError);
    CHECK_THROWS_AS((parse("A,B\nB,1.0,0.5\nA,0.5,1.0\n")), ParseError);
    CHECK_THROWS_AS((parse("A,B\n1.0,1.5\n1.5,1.0\n")), ValidationError);
    CHECK_THROWS_AS((parse("A,B\n0.9,0.5\n0.5,1.0\n")), ValidationError);
    CHECK_THROWS_AS(load_similarity_matrix("/nonexistent/file.csv"), ParseError);
}

TEST_CASE("csv round trip") {
    auto sim = load_similarity_matrix(DIVLAB_FIXTURE_DIR "/moss_5platform.csv");
    std::ostringstream out;
    write_similarity_csv(out, sim);
    CHECK(parse(out.str()) == sim);
}

TEST_CASE("windows line endings and byte order mark") {
    auto sim = parse("\xEF\xBB\xBF" "A,B\r\nA,1.0,0.25\r\nB,0.25,1.0\r\n");
    CHECK(sim.similarity(0, 1) == 0.25);
}

TEST_CASE("labeling counts") {
    VulnerabilityLabeling l({true, false, true});
    CHECK(l.vulnerable_count() == 2);
    CHECK(l.invulnerable_count() == 1);
}

TEST_CASE("threat model validation") {
    ThreatModel t;
    CHECK_NOTHROW(t.validate());
    t.goal = ConsecutiveIntervals{0};
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t.goal = ControlSeconds{0.0};
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t.goal = ControlSeconds{5.0};
    t.window = FiniteWindow{0.0};
    CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("policy validation") {
    CHECK_NOTHROW(MigrationPolicy{DiversityPolicy{3, {}}}.validate(5));
    CHECK_THROWS_AS((MigrationPolicy{DiversityPolicy{1, {}}}.validate(5)), ValidationError);
    CHECK_THROWS_AS((MigrationPolicy{DiversityPolicy{6, {}}}.validate(5)), ValidationError);
    CHECK_THROWS_AS((MigrationPolicy{DiversityPolicy{3, 7}}.validate(5)), ValidationError);
    CHECK_THROWS_AS(MigrationPolicy{RandomKPolicy{6}}.validate(5), ValidationError);
    CHECK_THROWS_AS(MigrationPolicy{UniformNoRepeatPolicy{}}.validate(1), ValidationError);
    CHECK_NOTHROW(MigrationPolicy{FixedPeriodicPolicy{{0, 1, 2}}}.validate(3));
    CHECK_THROWS_AS(MigrationPolicy{FixedPeriodicPolicy{{}}}.validate(3), ValidationError);
    CHECK_THROWS_AS((MigrationPolicy{FixedPeriodicPolicy{{0, 0, 1}}}.validate(3)), ValidationError);
    // wraparound repeat
    CHECK_THROWS_AS((MigrationPolicy{FixedPeriodicPolicy{{0, 1, 0}}}.validate(3)), ValidationError);
    CHECK_THROWS_AS((MigrationPolicy{FixedPeriodicPolicy{{0, 3}}}.validate(3)), ValidationError);

    CHECK(policy_name(DiversityPolicy{3, {}}) == "diversity");
    CHECK(policy_name(UniformNoRepeatPolicy{}) == "uniform");
    CHECK(policy_name(RandomKPolicy{3}) == "random_k");
    CHECK(policy_name(FixedPeriodicPolicy{{0, 1}}) == "fixed");
}
