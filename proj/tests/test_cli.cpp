#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <functional>

#include "nzeta/affine_maps.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("nzeta-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome zeta(const std::string& args, const std::string& env = "") {
  fs::path out = scratch() / "out.txt", err = scratch() / "err.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + "'" ZETA_BIN "' " + args + " >'" + out.string() + "' 2>'" +
                    err.string() + "'";
  int status = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

json parse(const Outcome& r) { return json::parse(r.out); }

// the bundled corpus restricted to some manifolds, optionally with one
// template corrupted
fs::path sub_corpus(const std::vector<std::string>& ids, const std::string& name,
                    const std::function<void(json&)>& edit = {}) {
  std::ifstream in(nzeta::Corpus::default_path());
  json doc = json::parse(in);
  json keep = json::array();
  for (const auto& f : doc["families"])
    if (std::find(ids.begin(), ids.end(), f["manifold"].get<std::string>()) != ids.end()) keep.push_back(f);
  doc["families"] = keep;
  if (edit) edit(doc);
  fs::path p = scratch() / name;
  std::ofstream(p) << doc.dump(1);
  return p;
}

}  // namespace

TEST(Catalog, ListsEveryEntry) {
  Outcome r = zeta("catalog --json");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = parse(r);
  ASSERT_EQ(j.size(), 24u);
  std::size_t abelian = 0;
  for (const auto& e : j) {
    abelian += e["model"] == "abelian";
    EXPECT_GT(e["families"].get<int>(), 0) << e["id"];
  }
  EXPECT_EQ(abelian, 13u);
  Outcome text = zeta("catalog");
  EXPECT_EQ(std::count(text.out.begin(), text.out.end(), '\n'), 24);
}

TEST(Catalog, Filters) {
  json j = parse(zeta("catalog --json --filter heis"));
  EXPECT_EQ(j.size(), 11u);
  for (const auto& e : j) EXPECT_EQ(e["model"], "heisenberg");
  Outcome none = zeta("catalog --filter nonexistent");
  EXPECT_EQ(none.code, 0);
  EXPECT_TRUE(none.out.empty());
}

TEST(Compute, KleinFamilyByParameters) {
  Outcome r = zeta("compute --manifold klein-bottle --param a=3 --param b=5 --param s=1/2 --json");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = parse(r);
  EXPECT_EQ(j["nielsen_zeta"], json::parse(R"([{"exp":-1,"poly":[1,-15]},{"exp":1,"poly":[1,-5]}])"));
  EXPECT_EQ(j["nielsen_zeta"], j["table_zeta"]);
  EXPECT_EQ(j["lefschetz_zeta"], json::parse(R"([{"exp":1,"poly":[1,-3]},{"exp":-1,"poly":[1,-1]}])"));
  EXPECT_EQ(j["family"], "klein-bottle#1");
  EXPECT_EQ(j["cell"], "i2.ee");
  EXPECT_EQ(j["index"], 2);
  EXPECT_EQ(j["anosov"], "unknown");
  EXPECT_EQ(j["params"]["r"], "0");
  EXPECT_EQ(j["d"], json::parse(R"([0, "1/2"])"));
  ASSERT_EQ(j["nielsen"].size(), 40u);
  EXPECT_EQ(j["nielsen"][0], 10);
  EXPECT_EQ(j["lefschetz"][1], -8);
  EXPECT_TRUE(j["routes_agree"].get<bool>());
}

TEST(Compute, CircleIdentityAndHantzscheWendt) {
  json c = parse(zeta("compute --manifold circle --param d=1 --json --kmax 5"));
  EXPECT_EQ(c["nielsen_zeta"], json::array());
  EXPECT_EQ(c["nielsen"], json::parse("[0,0,0,0,0]"));

  Outcome r = zeta("compute --manifold hantzsche-wendt --param a=1 --param b=1 --param c=1 --param r=1/2 --param s=1/2 "
               "--param t=1/2 --json --kmax 6");
  ASSERT_EQ(r.code, 0) << r.err;
  json h = parse(r);
  // D = I: det(I - A) vanishes for every holonomy element
  EXPECT_EQ(h["nielsen"], json::parse("[0,0,0,0,0,0]"));
  EXPECT_EQ(h["lefschetz"], json::parse("[0,0,0,0,0,0]"));
  EXPECT_EQ(h["nielsen_zeta"], json::array());
}

TEST(Compute, ExplicitMatrix) {
  Outcome r = zeta("compute --manifold torus2 --matrix '2,1;1,1' --json --kmax 3");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = parse(r);
  EXPECT_EQ(j["cell"], "i1.oe");
  EXPECT_EQ(j["nielsen"], json::parse("[1,5,16]"));
  EXPECT_FALSE(j.contains("family"));
  Outcome text = zeta("compute --manifold klein-bottle --matrix '3,0;0,5' --translation '0,1/2'");
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("N_f(z)"), std::string::npos);
}

TEST(Compute, JsonRoundTrips) {
  for (const std::string args : {"--manifold klein-bottle --param a=3 --param b=5 --param s=1/2",
                                 "--manifold heis-VIII --param k=4 --param a=3 --param b=1 --param t=1/4",
                                 "--manifold flat3-8 --family 1 --param a=2 --param b=1 --param c=7 --param t=1/3"}) {
    Outcome r = zeta("compute --json " + args);
    ASSERT_EQ(r.code, 0) << args << ": " << r.err;
    EXPECT_EQ(json::parse(r.out).dump(2) + "\n", r.out) << args;
  }
}

TEST(Compute, ExitCodes) {
  Outcome c = zeta("compute --manifold heis-II --param k=3");
  EXPECT_EQ(c.code, 3);
  EXPECT_NE(c.err.find("even(k)"), std::string::npos) << c.err;

  Outcome fam = zeta("compute --manifold klein-bottle --family 2 --param a=3 --param b=5 --param s=1/4");
  EXPECT_EQ(fam.code, 3);
  EXPECT_NE(fam.err.find("b = 5 must be even"), std::string::npos) << fam.err;

  Outcome bad = zeta("compute --manifold klein-bottle --matrix '2,0;0,5' --translation '0,1/2'");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("does not induce a self-map"), std::string::npos);

  EXPECT_EQ(zeta("compute --manifold klein-bottle --matrix '1,0,0;0,1,0;0,0,1'").code, 2);
  EXPECT_NE(zeta("compute --manifold klein-bottle --param a=3 --kmax 0").code, 0);
  EXPECT_NE(zeta("compute --manifold klein-bottle --param a=3 --kmax 201").code, 0);
  EXPECT_NE(zeta("compute --manifold no-such-thing").code, 0);
  EXPECT_NE(zeta("compute --manifold klein-bottle --param a=x").code, 0);
}

TEST(VerifyTables, PassesOnASubCorpus) {
  fs::path p = sub_corpus({"circle", "torus2", "klein-bottle", "hantzsche-wendt", "heis-I", "heis-VIII"}, "good.json");
  Outcome r = zeta("verify-tables --samples 3 --json --corpus '" + p.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  json j = parse(r);
  EXPECT_EQ(j["instances"], j["passed"]);
  EXPECT_EQ(j["failures"], json::array());
  EXPECT_GT(j["instances"].get<int>(), 30);
}

TEST(VerifyTables, CorruptedTemplateFailsExactlyThatRow) {
  fs::path p = sub_corpus({"circle", "klein-bottle"}, "bad.json", [](json& doc) {
    for (auto& f : doc["families"])
      if (f["manifold"] == "klein-bottle" && f["index"] == 2) {
        std::string s = f.dump();
        auto at = s.find("1 - b*z");
        ASSERT_NE(at, std::string::npos) << s;
        s.replace(at, 7, "1 - 2*b*z");
        f = json::parse(s);
      }
  });
  Outcome r = zeta("verify-tables --samples 3 --json --corpus '" + p.string() + "'");
  EXPECT_EQ(r.code, 4);
  json j = parse(r);
  ASSERT_GT(j["failures"].size(), 0u);
  for (const auto& f : j["failures"]) EXPECT_EQ(f["family"], "klein-bottle#2");
  EXPECT_EQ(j["instances"].get<int>() - j["passed"].get<int>(), static_cast<int>(j["failures"].size()));

  // the same file through the environment
  Outcome viaenv = zeta("verify-tables --samples 3", "ZETA_CORPUS='" + p.string() + "'");
  EXPECT_EQ(viaenv.code, 4);
  EXPECT_NE(viaenv.out.find("FAIL klein-bottle#2"), std::string::npos);
  EXPECT_EQ(viaenv.out.find("FAIL klein-bottle#1"), std::string::npos);
}

TEST(VerifyTables, ZeroSamplesIsAVacuousPass) {
  Outcome r = zeta("verify-tables --samples 0");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("0 instances"), std::string::npos);
}

TEST(VerifyTables, UnreadableCorpus) {
  EXPECT_EQ(zeta("verify-tables --corpus /nonexistent/families.json").code, 4);
  fs::path junk = scratch() / "junk.json";
  std::ofstream(junk) << "{\"families\": [{\"manifold\": 3}]}";
  EXPECT_EQ(zeta("verify-tables --corpus '" + junk.string() + "'").code, 4);
}
