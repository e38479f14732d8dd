#include <gtest/gtest.h>

#include <filesystem>

#include "sigwin/error.hpp"
#include "sigwin/evalkit.hpp"
#include "sigwin/identify.hpp"
#include "test_support.hpp"

namespace sigwin {
namespace {

using testing::fragment_from;

GrayImage dot_image() {
  GrayImage img(40, 40, 240);
  for (int y = 19; y <= 21; ++y)
    for (int x = 19; x <= 21; ++x) img.at(x, y) = 10;
  return img;
}

GrayImage writer_sample(std::uint64_t writer, std::uint64_t sample) {
  return synth_signature(writer_style(writer), sample);
}

WriterProfile profile_with(const std::string& id, const std::vector<Fragment>& reps) {
  WriterProfile p;
  p.writer_id = id;
  p.sample_count = 1;
  p.codebook = cluster(reps, 0.99);
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Enroll, SingleDot) {
  const WriterProfile p = enroll("dot", {dot_image()}, PipelineConfig{});
  EXPECT_EQ(p.sample_count, 1u);
  ASSERT_EQ(p.codebook.classes.size(), 1u);
  EXPECT_EQ(p.codebook.classes[0].frequency(), 1u);
}

TEST(Enroll, DuplicateImageDoublesFrequencies) {
  const GrayImage img = writer_sample(3, 100);
  const PipelineConfig config;
  const WriterProfile once = enroll("a", {img}, config);
  const WriterProfile twice = enroll("a", {img, img}, config);
  ASSERT_EQ(twice.codebook.classes.size(), once.codebook.classes.size());
  for (std::size_t k = 0; k < once.codebook.classes.size(); ++k) {
    EXPECT_EQ(twice.codebook.classes[k].representative(), once.codebook.classes[k].representative());
    EXPECT_EQ(twice.codebook.classes[k].frequency(), 2 * once.codebook.classes[k].frequency());
  }
}

TEST(Enroll, BlankPageIsEmptyImage) {
  EXPECT_EQ(code_of([] { enroll("x", {GrayImage(50, 50, 255)}, PipelineConfig{}); }),
            ErrorCode::kEmptyImage);
}

TEST(Enroll, Deterministic) {
  const std::vector<GrayImage> images = {writer_sample(1, 1), writer_sample(1, 2)};
  EXPECT_EQ(enroll("w", images, PipelineConfig{}).codebook,
            enroll("w", images, PipelineConfig{}).codebook);
}

TEST(MatchScore, AllVerbatim) {
  const Fragment a = fragment_from({"110", "010", "000"});
  const Fragment b = fragment_from({"001", "001", "111"});
  EXPECT_DOUBLE_EQ(match_score({a, b, a}, profile_with("w", {a, b})), 1.0);
}

TEST(MatchScore, ComplementClipsToZero) {
  const Fragment a = fragment_from({"110", "010", "000"});
  const Fragment not_a = fragment_from({"001", "101", "111"});
  EXPECT_DOUBLE_EQ(match_score({not_a}, profile_with("w", {a})), 0.0);
}

TEST(MatchScore, HalfWhenOneExactOneIndependent) {
  const Fragment x = fragment_from({"11", "00"});
  const Fragment y = fragment_from({"10", "10"});
  EXPECT_DOUBLE_EQ(match_score({x, y}, profile_with("w", {x})), 0.5);
}

TEST(MatchScore, NoFragments) {
  const Fragment x = fragment_from({"11", "00"});
  EXPECT_EQ(code_of([&] { match_score({}, profile_with("w", {x})); }), ErrorCode::kNoFragments);
}

class RegistryFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    for (std::uint64_t w = 0; w < 3; ++w) {
      registry_.add(enroll("w" + std::to_string(w), {writer_sample(w, 10), writer_sample(w, 11)},
                           registry_.config()));
    }
  }
  Registry registry_;
};

TEST_F(RegistryFixture, SelfMatchRanksFirstWithScoreOne) {
  const MatchReport report = identify(writer_sample(1, 10), registry_);
  ASSERT_EQ(report.ranked.size(), 3u);
  EXPECT_EQ(report.ranked[0].writer_id, "w1");
  EXPECT_DOUBLE_EQ(report.ranked[0].score, 1.0);
  for (std::size_t i = 1; i < report.ranked.size(); ++i) {
    EXPECT_LE(report.ranked[i].score, report.ranked[i - 1].score);
    EXPECT_GE(report.ranked[i].score, 0.0);
  }
  EXPECT_EQ(report.ranked[0].best_similarities.size(), report.fragment_count);
}

TEST_F(RegistryFixture, HeldOutSampleIdentified) {
  EXPECT_EQ(identify(writer_sample(2, 99), registry_).ranked.front().writer_id, "w2");
}

TEST_F(RegistryFixture, VerifyThresholds) {
  const GrayImage own = writer_sample(0, 10);
  EXPECT_TRUE(verify(own, "w0", registry_, 0.5).accepted);
  EXPECT_TRUE(verify(own, "w0", registry_, 1.0).accepted);  // score exactly tau

  const Verdict v = verify(writer_sample(0, 50), "w1", registry_, 0.0);
  EXPECT_TRUE(v.accepted);
  bool was_rejected = false;
  for (double tau = 0.0; tau <= 1.0; tau += 0.05) {
    const bool accepted = verify(writer_sample(0, 50), "w1", registry_, tau).accepted;
    EXPECT_FALSE(was_rejected && accepted) << "accept after reject at tau " << tau;
    was_rejected = !accepted;
  }
  EXPECT_EQ(code_of([&] { verify(own, "nobody", registry_, 0.5); }), ErrorCode::kUnknownWriter);
}

TEST(Verify, ZeroScoreRejected) {
  const Fragment a = fragment_from({"110", "010", "000"});
  const Fragment not_a = fragment_from({"001", "101", "111"});
  Registry reg;
  reg.add(profile_with("w", {a}));
  EXPECT_FALSE(verify_fragments({not_a}, "w", reg, 0.5).accepted);
  EXPECT_TRUE(verify_fragments({a}, "w", reg, 0.5).accepted);
}

TEST(Identify, SingleWriterAndTies) {
  const Fragment a = fragment_from({"110", "010", "000"});
  Registry reg;
  reg.add(profile_with("zed", {a}));
  EXPECT_EQ(identify_fragments({a}, reg).ranked.size(), 1u);
  reg.add(profile_with("abe", {a}));
  const MatchReport report = identify_fragments({a}, reg);
  ASSERT_EQ(report.ranked.size(), 2u);
  EXPECT_EQ(report.ranked[0].writer_id, "abe");
  EXPECT_EQ(report.ranked[1].writer_id, "zed");
  EXPECT_EQ(report.ranked[0].score, report.ranked[1].score);
}

TEST(Identify, Errors) {
  EXPECT_EQ(code_of([] { identify(dot_image(), Registry{}); }), ErrorCode::kEmptyRegistry);
  Registry reg;
  reg.add(enroll("d", {dot_image()}, reg.config()));
  EXPECT_EQ(code_of([&] { identify(GrayImage(40, 40, 250), reg); }), ErrorCode::kEmptyImage);
}

TEST(RegistryDir, SaveLoadAndManifestMismatch) {
  const auto dir = std::filesystem::temp_directory_path() / "sigwin_registry_test";
  std::filesystem::remove_all(dir);
  Registry reg;
  reg.add(enroll("alice", {writer_sample(4, 1)}, reg.config()));
  reg.add(enroll("bob", {writer_sample(5, 1), writer_sample(5, 2)}, reg.config()));
  reg.save(dir);

  const Registry back = Registry::load(dir, PipelineConfig{});
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at("bob").sample_count, 2u);
  EXPECT_EQ(back.at("alice").codebook, reg.at("alice").codebook);

  PipelineConfig other;
  other.cluster_theta = 0.7;
  EXPECT_EQ(code_of([&] { Registry::load(dir, other); }), ErrorCode::kConfigMismatch);
  other = PipelineConfig{};
  other.verify_tau = 0.9;  // not part of the manifest
  EXPECT_NO_THROW(Registry::load(dir, other));
}

TEST(RegistryDir, WriterIds) {
  EXPECT_TRUE(valid_writer_id("user_01-a.b"));
  EXPECT_FALSE(valid_writer_id(""));
  EXPECT_FALSE(valid_writer_id(".hidden"));
  EXPECT_FALSE(valid_writer_id("a/b"));
  EXPECT_FALSE(valid_writer_id("a b"));
}

}  // namespace
}  // namespace sigwin
