#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"
#include "subexp/serialization.hpp"

using namespace subexp;
using subexp::testing::reference_system;

namespace {

const json& reference_json() {
  static const json j = system_to_json(reference_system());
  return j;
}

std::string format_error_of(const json& j) {
  try {
    system_from_json(j);
  } catch (const FormatError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Format17, RoundTrips) {
  for (double v : {0.1, pi, -1e-300, 6.02214076e23, 1.0 / 3.0}) EXPECT_EQ(std::stod(format17(v)), v);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
}

TEST(SystemJson, RoundTripIsExact) {
  const auto& ws = reference_system();
  const auto loaded = system_from_json(json::parse(reference_json().dump()));
  EXPECT_TRUE(loaded.digest_matches);
  EXPECT_EQ(loaded.stored_digest, certificate_digest(ws));
  EXPECT_EQ(loaded.system.a, ws.a);
  EXPECT_EQ(loaded.system.rho2, ws.rho2);
  ASSERT_EQ(loaded.system.psi_hat.grid().count, ws.psi_hat.grid().count);
  for (std::size_t i = 0; i < ws.psi_hat.grid().count; ++i) {
    ASSERT_EQ(loaded.system.psi_hat.values()[i], ws.psi_hat.values()[i]);
    ASSERT_EQ(loaded.system.phi_hat.values()[i], ws.phi_hat.values()[i]);
  }
  EXPECT_EQ(loaded.system.certificates.size(), ws.certificates.size());
  EXPECT_EQ(system_to_json(loaded.system).dump(), reference_json().dump());
}

TEST(SystemJson, DigestDetectsEdits) {
  json j = reference_json();
  ASSERT_NE(j["psi_hat"]["re"][5800].get<double>(), 0.0);
  j["psi_hat"]["re"][5800] = j["psi_hat"]["re"][5800].get<double>() * 0.5;
  const auto loaded = system_from_json(j);
  EXPECT_FALSE(loaded.digest_matches);
}

TEST(SystemJson, RejectsMalformedDocuments) {
  json wrong = reference_json();
  wrong["format"] = "dhws-v0";
  EXPECT_NE(format_error_of(wrong).find("not a dhws-v1 document"), std::string::npos);

  json truncated = reference_json();
  truncated["phi_hat"]["im"].erase(truncated["phi_hat"]["im"].size() - 1);
  EXPECT_NE(format_error_of(truncated).find("do not match the spectral grid"), std::string::npos);

  json text = reference_json();
  text["params"]["a"] = "one";
  EXPECT_NE(format_error_of(text).find("expected a number"), std::string::npos);

  json missing = reference_json();
  missing.erase("options");
  EXPECT_NE(format_error_of(missing).find("malformed system file"), std::string::npos);

  json outside = reference_json();
  outside["params"]["a"] = 2.0;
  EXPECT_NE(format_error_of(outside).find("invalid system parameters"), std::string::npos);

  json leak = reference_json();
  leak["psi_hat"]["re"][0] = 1.0;  // xi = -3pi lies outside the declared support
  EXPECT_FALSE(format_error_of(leak).empty());
}

TEST(SystemFile, SaveLoadAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "subexp_serialization_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "system.json").string();
  save_system(reference_system(), path);
  EXPECT_TRUE(load_system(path).digest_matches);
  write_text(path, "{ not json");
  EXPECT_THROW(load_system(path), FormatError);
  EXPECT_THROW(load_system((dir / "absent.json").string()), FormatError);
  std::filesystem::remove_all(dir);
}

TEST(Csv, HeaderRowsAndWidth) {
  CsvWriter w({"m", "sup_error"});
  w.row({0.0, 0.1});
  EXPECT_EQ(w.str(), "m,sup_error\n0,0.10000000000000001\n");
  EXPECT_THROW(w.row({1.0}), PreconditionError);
}

TEST(Csv, SamplesHaveThreeColumns) {
  const auto f = SampledFunction::from_function(Grid1D(0.0, 0.5, 3), [](double x) { return cplx(x, -x); });
  EXPECT_EQ(samples_csv(f), "x,re,im\n0,0,-0\n0.5,0.5,-0.5\n1,1,-1\n");
}
