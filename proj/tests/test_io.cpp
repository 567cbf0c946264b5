#include <gtest/gtest.h>

#include <qtexture/io.hpp>

#include "support/states.hpp"
#include "support/tempdir.hpp"

using namespace qtex;

TEST(StateFile, ParsesPureState) {
  const AnyState s = parse_state(json::parse(R"({"dims":[2,2],"kind":"pure","re":[0.5,0.5,0.5,0.5],"im":[0,0,0,0]})"));
  const PureState& psi = std::get<PureState>(s);
  EXPECT_EQ(psi.dims(), (Dims{2, 2}));
  EXPECT_NEAR(psi.amplitudes()(3).real(), 0.5, 1e-15);
}

TEST(StateFile, ParsesMixedStateNestedOrFlat) {
  const AnyState nested =
      parse_state(json::parse(R"({"dims":[2],"kind":"mixed","re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]})"));
  const AnyState flat = parse_state(json::parse(R"({"dims":[2],"kind":"mixed","re":[0.5,0,0,0.5],"im":[0,0,0,0]})"));
  EXPECT_LT(detail::max_abs(std::get<DensityMatrix>(nested).matrix() - std::get<DensityMatrix>(flat).matrix()), 1e-15);
}

TEST(StateFile, RejectsMalformedDocuments) {
  const char* bad[] = {
      R"({"kind":"pure","re":[1],"im":[0]})",
      R"({"dims":[2],"kind":"pure","re":[1],"im":[0]})",
      R"({"dims":[2],"kind":"pure","re":[1,0],"im":[0]})",
      R"({"dims":[2],"kind":"pure","re":[1,"x"],"im":[0,0]})",
      R"({"dims":[2],"kind":"thermal","re":[1,0],"im":[0,0]})",
      R"({"dims":[0],"kind":"pure","re":[],"im":[]})",
      R"({"dims":[2],"kind":"pure","re":[2,0],"im":[0,0]})",
      R"({"dims":[2],"kind":"mixed","re":[[1,0],[0,1]],"im":[[0,0],[0,0]]})",
      R"({"dims":[2],"kind":"mixed","re":[[1,0.5],[0,0]],"im":[[0,0],[0,0]]})",
      R"({"dims":[2],"kind":"mixed","re":[[1,0,0],[0,0,0]],"im":[[0,0],[0,0]]})",
      R"([1,2,3])",
  };
  for (const char* text : bad) EXPECT_THROW(parse_state(json::parse(text)), invalid_state_error) << text;
}

TEST(StateFile, LoadReportsUnreadableFiles) {
  fixtures::TempDir dir;
  EXPECT_THROW(load_state(dir.path("missing.json")), invalid_state_error);
  EXPECT_THROW(load_state(dir.file("broken.json", "{not json")), invalid_state_error);
}

TEST(StateFile, RoundTripsPureAndMixedStates) {
  fixtures::TempDir dir;
  Rng rng = make_rng(21);
  const PureState psi = random_pure_state(6, rng, {2, 3});
  const DensityMatrix rho = random_density_matrix(4, rng, {2, 2}, 3);

  const AnyState back_psi = load_state(dir.file("p.json", state_to_json(psi).dump()));
  EXPECT_EQ(std::get<PureState>(back_psi).dims(), psi.dims());
  EXPECT_LT((std::get<PureState>(back_psi).amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);

  const AnyState back_rho = load_state(dir.file("r.json", state_to_json(rho).dump()));
  EXPECT_LT(detail::max_abs(std::get<DensityMatrix>(back_rho).matrix() - rho.matrix()), 1e-15);
}

TEST(StateFile, DecompositionDumpReloadsAsStates) {
  const std::vector<WeightedState> parts{{0.25, fixtures::bell()}, {0.75, fixtures::ket({1, 0, 0, 0}, {2, 2})}};
  const json doc = decomposition_to_json(parts);
  ASSERT_EQ(doc.at("states").size(), 2u);
  EXPECT_EQ(doc.at("states")[0].at("probability").get<double>(), 0.25);
  const PureState back = std::get<PureState>(parse_state(doc.at("states")[1]));
  EXPECT_NEAR(std::abs(back.amplitudes()(0)), 1.0, 1e-15);
}

TEST(UnitaryFile, LoadsNestedAndFlat) {
  fixtures::TempDir dir;
  const double r = 1 / std::sqrt(2.0);
  const std::string nested = dir.file("h.json", json{{"re", {{r, r}, {r, -r}}}, {"im", {{0, 0}, {0, 0}}}}.dump());
  const std::string flat = dir.file("hf.json", json{{"re", {r, r, r, -r}}, {"im", {0, 0, 0, 0}}}.dump());
  EXPECT_LT(detail::max_abs(load_unitary(nested) - load_unitary(flat)), 1e-15);
  EXPECT_THROW(load_unitary(dir.file("x.json", R"({"re":[[1,0],[0,1]]})")), invalid_state_error);
}

TEST(NumberFormat, TwelveSignificantDigitsRoundTrip) {
  Rng rng = make_rng(22);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    const double back = std::stod(format_number(x));
    EXPECT_LE(std::abs(back - x), 1e-11 * std::abs(x));
  }
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Record, WritesAllFormats) {
  Record r;
  r.add("value", 0.5).add("count", 3).add("ok", true).add("list", std::vector<double>{1, 2});
  std::ostringstream s, c, h;
  r.write(s, OutputFormat::structured);
  r.write(c, OutputFormat::csv);
  r.write(h, OutputFormat::human);
  EXPECT_EQ(s.str(), "value: 0.5\ncount: 3\nok: true\nlist: 1,2\n");
  EXPECT_EQ(c.str(), "value,count,ok,list\n0.5,3,true,\"1,2\"\n");
  EXPECT_NE(h.str().find("value"), std::string::npos);
}
