#include <gtest/gtest.h>

#include <sstream>

#include "attn/errors.hpp"
#include "attn/text.hpp"
#include "support.hpp"

namespace attn {
namespace {

using Tokens = std::vector<std::string>;

TEST(TextTest, FoldCaseCoversLatinLetters) {
  EXPECT_EQ(fold_case("ÁGUA Ção"), "água ção");
  EXPECT_EQ(fold_case("ŁÓDŹ"), "łódź");
  EXPECT_EQ(fold_case("ΑΒΓ"), "ΑΒΓ");
  EXPECT_EQ(fold_case("x\xff"), "x\xef\xbf\xbd");
}

TEST(TextTest, TokenizeKeepsAccentsAndDigits) {
  EXPECT_EQ(tokenize("Não é verdade: 5G causa COVID-19!"), (Tokens{"Não", "é", "verdade", "5G", "causa", "COVID", "19"}));
  EXPECT_EQ(tokenize("fim… “aspas” 😀ok"), (Tokens{"fim", "aspas", "ok"}));
  EXPECT_TRUE(tokenize("  ,,, ").empty());
}

TEST(TextTest, PreprocessDropsStopwordsAndLemmatizes) {
  std::istringstream stop("# header\nThe\nde\n");
  std::istringstream lemmas("vacinas\tvacina\nMATA\tmatar\nbad-line-without-tab\n");
  const auto res = TextResources::parse(stop, lemmas);
  EXPECT_TRUE(res.stopwords.contains("the"));
  EXPECT_EQ(res.lemmas.at("mata"), "matar");
  EXPECT_EQ(preprocess("The VACINAS de hoje mata", res), (Tokens{"vacina", "hoje", "matar"}));
}

TEST(TextTest, LoadFromFiles) {
  const auto res = TextResources::load(test::fixture("stopwords.txt"), test::fixture("lemmas.tsv"));
  EXPECT_EQ(res.stopwords.size(), 4u);
  EXPECT_EQ(res.lemmas.at("matou"), "matar");
  EXPECT_THROW(TextResources::load(test::fixture("missing.txt"), test::fixture("lemmas.tsv")), ConfigError);
}

TEST(TextTest, ShippedPortugueseTablesLoad) {
  const auto data = std::filesystem::path(ATTN_FIXTURES_DIR) / ".." / ".." / "data";
  const auto res = TextResources::load(data / "stopwords_pt.txt", data / "lemmas_pt.tsv");
  // Negation changes the claim, so it is kept.
  EXPECT_FALSE(res.stopwords.contains("não"));
  EXPECT_TRUE(res.stopwords.contains("você"));
  EXPECT_EQ(preprocess("As URNAS foram fraudadas", res), (Tokens{"urna", "fraudar"}));
}

}  // namespace
}  // namespace attn
