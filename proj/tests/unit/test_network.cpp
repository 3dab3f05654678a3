#include "cstrph/case_study.hpp"
#include "cstrph/network.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace cstrph;

namespace {

const char* kMinimal = R"([species]
A cp=75.24 h_ref=0 s_ref=50.6
B cp=60 h_ref=-4575 s_ref=180.2

[reactions]
A -> B k0f=1.2e9 Ef=72331.8 k0b=1.33e8 Eb=74826

[reactor]
V=0.001 P=1e5 T_ref=300 lambda=0.05808

[inlet]
T_in=310 c_A=2000

[noise]
rho1=0.1 rho2=5e-7 rho3=0.05
)";

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    s.replace(s.find(from), from.size(), to);
    return s;
}

ParseError parse_error(const std::string& text)
{
    try {
        parse_network(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "expected a parse error";
    return ParseError(0, 0, "");
}

bool has_message(const std::vector<Diagnostic>& d, const std::string& path, const std::string& msg)
{
    return std::any_of(d.begin(), d.end(),
                       [&](const Diagnostic& x) { return x.path == path && x.message == msg; });
}

}  // namespace

TEST(Network, ParsesMinimalDocument)
{
    const ReactionNetwork net = parse_network(kMinimal);
    ASSERT_EQ(net.num_species(), 2u);
    ASSERT_EQ(net.num_reactions(), 1u);
    EXPECT_EQ(net.species[1].name, "B");
    EXPECT_DOUBLE_EQ(net.species[1].h_ref, -4575.0);
    EXPECT_EQ(net.reactions[0].reactant_stoich, (std::vector<int>{1, 0}));
    EXPECT_EQ(net.reactions[0].product_stoich, (std::vector<int>{0, 1}));
    EXPECT_DOUBLE_EQ(net.reactor.R_gas, 8.314);
    EXPECT_EQ(net.inlet.c_in, (std::vector<double>{2000.0, 0.0}));
    EXPECT_EQ(net.species_index("B"), 1u);
    EXPECT_THROW((void)net.species_index("C"), std::out_of_range);
}

TEST(Network, BuiltinMatchesMinimalDocument)
{
    EXPECT_EQ(case_study::network(), parse_network(kMinimal));
}

TEST(Network, SerializeParseRoundTrip)
{
    const ReactionNetwork net = case_study::network();
    const std::string text = serialize_network(net);
    EXPECT_EQ(parse_network(text), net);
    EXPECT_EQ(serialize_network(parse_network(text)), text);
}

TEST(Network, RoundTripKeepsAwkwardDoubles)
{
    ReactionNetwork net = case_study::network();
    net.species[0].cp = 0.1 + 0.2;
    net.reactions[0].k0f = 1.0 / 3.0;
    net.noise.rho2 = 5e-324;
    EXPECT_EQ(parse_network(serialize_network(net)), net);
}

TEST(Network, StoichiometricCoefficients)
{
    const std::string text = replace(kMinimal, "A -> B", "2 A -> 3*B");
    const ReactionNetwork net = parse_network(text);
    EXPECT_EQ(net.reactions[0].reactant_stoich, (std::vector<int>{2, 0}));
    EXPECT_EQ(net.reactions[0].product_stoich, (std::vector<int>{0, 3}));
    EXPECT_EQ(parse_network(serialize_network(net)), net);
}

TEST(Network, ReactionsSectionOptional)
{
    std::string text = kMinimal;
    const auto a = text.find("[reactions]");
    const auto b = text.find("[reactor]");
    text.erase(a, b - a);
    const ReactionNetwork net = parse_network(text);
    EXPECT_EQ(net.num_reactions(), 0u);
    EXPECT_EQ(parse_network(serialize_network(net)), net);
}

TEST(Network, CommentsAndBlankLines)
{
    const std::string text = "# header\n\n" + replace(kMinimal, "[noise]", "[noise]  # trailing");
    EXPECT_NO_THROW(parse_network(text));
}

TEST(Network, MissingSectionReportsLineAndColumn)
{
    std::string text = kMinimal;
    text.erase(text.find("[noise]"));
    const ParseError e = parse_error(text);
    EXPECT_NE(std::string(e.what()).find("missing section [noise]"), std::string::npos) << e.what();
    EXPECT_GT(e.line(), 0u);
}

TEST(Network, UnknownSpeciesInReaction)
{
    const ParseError e = parse_error(replace(kMinimal, "A -> B", "A -> C"));
    EXPECT_NE(std::string(e.what()).find("unknown species C"), std::string::npos) << e.what();
    EXPECT_EQ(e.line(), 6u);
    EXPECT_EQ(e.column(), 6u);
}

TEST(Network, DuplicateSpecies)
{
    const ParseError e =
        parse_error(replace(kMinimal, "B cp=60 h_ref=-4575 s_ref=180.2", "A cp=60 h_ref=0 s_ref=1"));
    EXPECT_NE(std::string(e.what()).find("duplicate species A"), std::string::npos) << e.what();
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 1u);
}

TEST(Network, MissingKey)
{
    const ParseError e = parse_error(replace(kMinimal, "A cp=75.24 ", "A "));
    EXPECT_NE(std::string(e.what()).find("missing key 'cp' for species A"), std::string::npos)
        << e.what();
    EXPECT_EQ(e.line(), 2u);
}

TEST(Network, NonNumericValue)
{
    const ParseError e = parse_error(replace(kMinimal, "V=0.001", "V=small"));
    EXPECT_NE(std::string(e.what()).find("non-numeric value"), std::string::npos) << e.what();
    EXPECT_EQ(e.line(), 9u);
    EXPECT_EQ(e.column(), 3u);
}

TEST(Network, UnknownSection)
{
    const ParseError e = parse_error(replace(kMinimal, "[noise]", "[nois]"));
    EXPECT_NE(std::string(e.what()).find("unknown section"), std::string::npos);
}

TEST(Network, ValidationRejectsNonPositiveHeatCapacity)
{
    try {
        parse_network(replace(kMinimal, "cp=75.24", "cp=-1"));
        FAIL() << "expected InvalidNetwork";
    } catch (const InvalidNetwork& e) {
        EXPECT_TRUE(has_message(e.diagnostics(), "species.A.cp", "species.A.cp must be > 0"));
    }
}

TEST(Network, ValidationRejectsZeroNetStoichiometry)
{
    ReactionNetwork net = case_study::network();
    net.reactions[0].product_stoich = net.reactions[0].reactant_stoich;
    EXPECT_TRUE(has_message(validate(net), "reactions.0", "reaction 0 has zero net stoichiometry"));
}

TEST(Network, ValidationCollectsEveryViolation)
{
    ReactionNetwork net = case_study::network();
    net.reactor.V = 0.0;
    net.inlet.T_in = -1.0;
    net.noise.rho1 = -0.1;
    const auto d = validate(net);
    EXPECT_GE(d.size(), 3u);
    EXPECT_TRUE(validate(case_study::network()).empty());
}

TEST(Network, DiagnosticToStringDoesNotRepeatPath)
{
    const Diagnostic d{"species.A.cp", "species.A.cp must be > 0"};
    EXPECT_EQ(d.to_string(), "species.A.cp must be > 0");
    const Diagnostic e{"reactions.0", "reaction 0 has zero net stoichiometry"};
    EXPECT_EQ(e.to_string(), "reactions.0: reaction 0 has zero net stoichiometry");
}
