#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "corpus.hpp"
#include "matpres/matpres.hpp"

using namespace matpres;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string(::testing::TempDir()) + "matpres_cli_" + name;
}

int run_cli(const std::string& args, std::string* out_text = nullptr) {
  std::string out_file = tmp_path("stdout.txt");
  std::string cmd = std::string(MATPRES_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  int status = std::system(cmd.c_str());
  if (out_text) {
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    *out_text = ss.str();
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

Json identity_operator_json(int d) {
  OperatorTable<double> t(1, 2, d);
  for (const MultiIndex& beta : t.betas())
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        t.set_action(i, j, beta,
                     MatrixPoly<double>::monomial(1, beta, basis_element<double>(2, i, j)));
  return to_json(t);
}

Json family_json(bool negated) {
  Rng rng(606);
  auto fam = corpus::random_positive_family(rng, 1, 2, 3, true);
  if (negated) fam = corpus::negate_first_atom(fam);
  MeasureFamily<double> dfam(1, 2, MeasureFamily<double>::Dependence::Constant);
  for (const auto& atom : fam.atoms())
    dfam.add_atom({scalar_traits<ExactReal>::to_double(atom.t[0])},
                  LinMapPoly<double>::constant(1, linmap_to_double(atom.phi.at({ExactReal(0)}))));
  return to_json(dfam);
}

}  // namespace

TEST(Cli, CanonIdentityOperator) {
  std::string in = tmp_path("id_op.json");
  std::string out = tmp_path("id_rep.json");
  write_file(in, identity_operator_json(2).dump(2));
  EXPECT_EQ(run_cli("canon --input " + in + " --output " + out), 0);
  auto rep = rep_from_json<double>(load_json(out));
  // Q_0 is the identity map; all other alphas vanish
  for (const MultiIndex& alpha : rep.alphas())
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        auto h = basis_element<double>(2, i, j);
        if (mi_degree(alpha) == 0)
          EXPECT_EQ(max_coeff_dist(rep.q_image(i, j, alpha),
                                   MatrixPoly<double>::constant(1, h)),
                    0.0);
        else
          EXPECT_TRUE(rep.q_image(i, j, alpha).is_zero());
      }
}

TEST(Cli, CanonExplicitAgrees) {
  std::string in = tmp_path("id_op2.json");
  std::string out1 = tmp_path("rep_rec.json");
  std::string out2 = tmp_path("rep_exp.json");
  write_file(in, identity_operator_json(3).dump(2));
  EXPECT_EQ(run_cli("canon --input " + in + " --output " + out1), 0);
  EXPECT_EQ(run_cli("canon --explicit --input " + in + " --output " + out2), 0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Cli, CanonRejectsNonHermitian) {
  Json j = identity_operator_json(1);
  j["action"][0]["image"]["terms"][0]["coeff"]["entries"] =
      Json::array({Json::array({Json::array({1.0, 0.0}), Json::array({0.5, 0.0})}),
                   Json::array({Json::array({0.75, 0.0}), Json::array({1.0, 0.0})})});
  std::string in = tmp_path("nonherm.json");
  std::string out = tmp_path("nonherm_rep.json");
  write_file(in, j.dump(2));
  std::string text;
  EXPECT_EQ(run_cli("canon --input " + in + " --output " + out, &text), 3);
  EXPECT_NE(text.find("non-Hermitian image"), std::string::npos);
}

TEST(Cli, MalformedInputExitsTwo) {
  std::string in = tmp_path("garbage.json");
  write_file(in, "{ not json at all");
  std::string out = tmp_path("unused.json");
  EXPECT_EQ(run_cli("canon --input " + in + " --output " + out), 2);
  EXPECT_EQ(run_cli("canon --input " + tmp_path("missing_file.json") + " --output " + out), 2);
  // unknown flag is also a usage error
  EXPECT_EQ(run_cli("canon --frobnicate", nullptr), 2);
}

TEST(Cli, CheckIdentityPassesNecessaryConditions) {
  std::string in = tmp_path("id_check.json");
  write_file(in, identity_operator_json(2).dump(2));
  std::string text;
  EXPECT_EQ(run_cli("check --input " + in, &text), 0);
  EXPECT_NE(text.find("necessary-conditions-pass"), std::string::npos);
}

TEST(Cli, BuildPositiveFamilyAndCheckCertified) {
  std::string fam = tmp_path("fam.json");
  std::string op = tmp_path("fam_op.json");
  write_file(fam, family_json(false).dump(2));
  EXPECT_EQ(run_cli("build --input " + fam + " --output " + op + " --degree 4"), 0);
  // provenance is embedded, so check certifies by construction
  std::string text;
  EXPECT_EQ(run_cli("check --input " + op, &text), 0);
  EXPECT_NE(text.find("certified-positive-by-construction"), std::string::npos);
}

TEST(Cli, BuildRoundtripMatchesMoments) {
  std::string fam_path = tmp_path("fam_rt.json");
  std::string op = tmp_path("fam_rt_op.json");
  std::string rep_path = tmp_path("fam_rt_rep.json");
  Json fam_j = family_json(false);
  write_file(fam_path, fam_j.dump(2));
  ASSERT_EQ(run_cli("build --input " + fam_path + " --output " + op + " --degree 3"), 0);
  ASSERT_EQ(run_cli("canon --input " + op + " --output " + rep_path), 0);
  auto rep = rep_from_json<double>(load_json(rep_path));
  auto fam = family_from_json<double>(fam_j);
  std::vector<double> y{0.25};
  HermMatrix<double> mval = herm_identity<double>(2);
  auto mom = moments(fam.at(y), mval, 3);
  for (const MultiIndex& beta : rep.alphas()) {
    HermMatrix<double> got = rep.q_apply(beta, mval).evaluate(y);
    HermMatrix<double> want = mom.at(beta);
    EXPECT_LE((herm_to_double(got) - herm_to_double(want)).max_abs(), 1e-9);
  }
}

TEST(Cli, CheckNegatedFamilyFalsified) {
  std::string fam = tmp_path("bad_fam.json");
  std::string op = tmp_path("bad_op.json");
  write_file(fam, family_json(true).dump(2));
  EXPECT_EQ(run_cli("build --input " + fam + " --output " + op + " --degree 4"), 0);
  std::string text;
  EXPECT_EQ(run_cli("check --input " + op, &text), 1);
  EXPECT_NE(text.find("falsified"), std::string::npos);
}

TEST(Cli, BuildRequirePositiveRejectsNegated) {
  std::string fam = tmp_path("bad_fam2.json");
  std::string op = tmp_path("bad_op2.json");
  write_file(fam, family_json(true).dump(2));
  std::string text;
  EXPECT_EQ(run_cli("build --input " + fam + " --output " + op + " --degree 3 --require-positive",
                    &text),
            4);
  EXPECT_NE(text.find("not-positive"), std::string::npos);
}

TEST(Cli, LabExitCodes) {
  EXPECT_EQ(run_cli("lab"), 0);
  EXPECT_EQ(run_cli("lab --nodes 51"), 1);
  EXPECT_EQ(run_cli("lab --window 3"), 1);
  EXPECT_EQ(run_cli("lab --nodes 50"), 2);
}

TEST(Cli, LabReportJson) {
  std::string out = tmp_path("lab.json");
  ASSERT_EQ(run_cli("lab --output " + out), 0);
  Json j = load_json(out);
  EXPECT_EQ(j["verdict"], "reproduced");
  EXPECT_EQ(j["nodes"], 2001);
  EXPECT_TRUE(j["gates"]["tail"].get<bool>());
}

TEST(Cli, ReportsAreByteIdentical) {
  std::string in = tmp_path("det_op.json");
  std::string o1 = tmp_path("det1.json");
  std::string o2 = tmp_path("det2.json");
  write_file(in, identity_operator_json(2).dump(2));
  ASSERT_EQ(run_cli("canon --input " + in + " --output " + o1), 0);
  ASSERT_EQ(run_cli("canon --input " + in + " --output " + o2), 0);
  std::ifstream a(o1), b(o2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(sa.str().empty());
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("lab --help"), 0);
}
