// Copyright 2026-present the dsidx authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>
#include <cstring>
#include <fstream>
#include <iterator>
#include <thread>
#include <vector>

#include "support.hpp"

namespace dsidx {
namespace {

using testing::leaf_contents;
using testing::TempDir;

std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& b) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f.write(b.data(), static_cast<std::streamsize>(b.size()));
}

template <class T>
void poke(std::vector<char>& b, std::size_t at, T v) {
  std::memcpy(b.data() + at, &v, sizeof v);  // tests run on little-endian hosts
}

FormatErrorKind load_error_kind(const std::filesystem::path& p) {
  try {
    io::load_dataset(p);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "load succeeded";
  return FormatErrorKind::kIo;
}

SummaryParams make_params(std::size_t n, std::size_t w, unsigned bits) {
  SummaryParams p;
  p.length = n;
  p.segments = w;
  p.max_card_bits = bits;
  return p;
}

TEST(RandomWalk, ByteIdenticalAcrossRuns) {
  TempDir dir("gen");
  io::generate_random_walk(3, 8, 7, dir / "a.dsix");
  io::generate_random_walk(3, 8, 7, dir / "b.dsix");
  const auto a = read_bytes(dir / "a.dsix");
  EXPECT_EQ(a, read_bytes(dir / "b.dsix"));
  EXPECT_EQ(a.size(), 24u + 3 * 8 * 4);
  io::generate_random_walk(3, 8, 8, dir / "c.dsix");
  EXPECT_NE(a, read_bytes(dir / "c.dsix"));
}

TEST(RandomWalk, HeaderAndMoments) {
  TempDir dir("gen");
  io::generate_random_walk(40, 256, 3, dir / "d.dsix");
  const auto bytes = read_bytes(dir / "d.dsix");
  EXPECT_EQ(std::string(bytes.data(), 4), "DSIX");
  std::uint64_t count;
  std::uint32_t length, flags;
  std::memcpy(&count, bytes.data() + 8, 8);
  std::memcpy(&length, bytes.data() + 16, 4);
  std::memcpy(&flags, bytes.data() + 20, 4);
  EXPECT_EQ(count, 40u);
  EXPECT_EQ(length, 256u);
  EXPECT_EQ(flags & kFlagNormalized, kFlagNormalized);
  const auto ds = io::load_dataset(dir / "d.dsix");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double m = 0, v = 0;
    for (float x : ds[i]) m += x;
    m /= 256;
    for (float x : ds[i]) v += (x - m) * (x - m);
    EXPECT_NEAR(m, 0.0, 1e-3);
    EXPECT_NEAR(std::sqrt(v / 256), 1.0, 1e-3);
  }
}

TEST(RandomWalk, SeriesAreIndependentOfCount) {
  const auto small = io::generate_random_walk(5, 64, 9);
  const auto big = io::generate_random_walk(50, 64, 9);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_TRUE(std::equal(small[i].begin(), small[i].end(), big[i].begin()));
  }
}

TEST(RandomWalk, UnwritablePath) {
  EXPECT_THROW(io::generate_random_walk(2, 4, 1, "/nonexistent-dir/x.dsix"), FormatError);
}

TEST(Dsix, RoundTripIsExact) {
  TempDir dir("dsix");
  auto ds = testing::gaussian_dataset(17, 12, 4);
  io::write_dataset(dir / "r.dsix", ds);
  const auto back = io::load_dataset(dir / "r.dsix");
  EXPECT_EQ(back.values(), ds.values());
  EXPECT_EQ(back.length(), 12u);
  EXPECT_FALSE(back.normalized());
  ds.set_flags(kFlagNormalized);
  io::write_dataset(dir / "n.dsix", ds);
  EXPECT_TRUE(io::load_dataset(dir / "n.dsix").normalized());
}

TEST(Dsix, EveryCorruptHeaderFieldHasItsOwnError) {
  TempDir dir("dsix");
  const auto good_path = dir / "g.dsix";
  io::generate_random_walk(4, 16, 1, good_path);
  const auto good = read_bytes(good_path);
  const auto bad = dir / "b.dsix";

  auto with = [&](auto mutate) {
    auto b = good;
    mutate(b);
    write_bytes(bad, b);
    return load_error_kind(bad);
  };
  EXPECT_EQ(with([](auto& b) { b.resize(10); }), FormatErrorKind::kTruncatedHeader);
  EXPECT_EQ(with([](auto& b) { b[0] = 'X'; }), FormatErrorKind::kBadMagic);
  EXPECT_EQ(with([](auto& b) { poke<std::uint32_t>(b, 4, 9); }), FormatErrorKind::kBadVersion);
  EXPECT_EQ(with([](auto& b) { poke<std::uint32_t>(b, 16, 0); }), FormatErrorKind::kBadLength);
  EXPECT_EQ(with([](auto& b) { poke<std::uint32_t>(b, 20, 0x80); }), FormatErrorKind::kBadFlags);
  EXPECT_EQ(with([](auto& b) { poke<std::uint64_t>(b, 8, 5); }), FormatErrorKind::kSizeMismatch);
  EXPECT_EQ(with([](auto& b) { b.pop_back(); }), FormatErrorKind::kSizeMismatch);
  EXPECT_EQ(load_error_kind(dir / "missing.dsix"), FormatErrorKind::kIo);
}

TEST(Dsix, TruncationNamesSizesAndOffset) {
  TempDir dir("dsix");
  io::generate_random_walk(4, 16, 1, dir / "g.dsix");
  auto b = read_bytes(dir / "g.dsix");
  b.resize(b.size() - 10);
  write_bytes(dir / "t.dsix", b);
  try {
    io::load_dataset(dir / "t.dsix");
    FAIL();
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(std::to_string(24 + 4 * 16 * 4)), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(b.size())), std::string::npos) << msg;
    EXPECT_GT(e.offset(), 0u);
  }
}

TEST(StreamBuild, MatchesInMemoryBuildForEveryChunkSize) {
  TempDir dir("stream");
  const auto path = dir / "s.dsix";
  const auto ds = io::generate_random_walk(30000, 128, 17, path);
  const auto p = make_params(128, 16, 8);
  const auto ref = leaf_contents(build(ds, p, {1, 300}));
  for (std::size_t chunk : {1000u, 7000u, 65536u, 30000u}) {
    for (std::size_t workers : {1u, 3u}) {
      auto r = io::stream_build(path, p, {workers, chunk, 300, true});
      EXPECT_EQ(leaf_contents(r.tree), ref) << "chunk " << chunk << " workers " << workers;
      EXPECT_EQ(r.dataset.values(), ds.values());
    }
  }
}

TEST(StreamBuild, TimelineShowsReadsAndSummarization) {
  TempDir dir("stream");
  const auto path = dir / "s.dsix";
  io::generate_random_walk(20000, 128, 2, path);
  auto r = io::stream_build(path, make_params(128, 16, 8), {2, 1000, 2000, false});
  std::size_t reads = 0, summaries = 0;
  for (const auto& e : r.timeline) {
    EXPECT_LE(e.begin_ms, e.end_ms);
    (e.kind == io::TimelineEvent::Kind::kRead ? reads : summaries)++;
  }
  EXPECT_EQ(reads, 20u);
  EXPECT_EQ(summaries, 40u);
  EXPECT_TRUE(r.dataset.empty());

  // Whether a read and a summarization interval actually intersect is up to
  // the OS scheduler (on a single core the coordinator may finish its read
  // before any worker is scheduled), so look for it across a few runs.
  double best = io::overlap_ms(r.timeline);
  for (int run = 0; run < 10 && best <= 0.0; ++run) {
    best = io::overlap_ms(io::stream_build(path, make_params(128, 16, 8), {2, 1000, 2000, false}).timeline);
  }
  EXPECT_GT(best, 0.0);
}

TEST(StreamBuild, OverlapArithmetic) {
  using K = io::TimelineEvent::Kind;
  const std::vector<io::TimelineEvent> t{
      {K::kRead, 0, 0, 0, 10}, {K::kSummarize, 0, 0, 5, 12}, {K::kSummarize, 0, 1, 6, 8},
      {K::kRead, 1, 0, 20, 30}, {K::kSummarize, 1, 0, 31, 40}};
  EXPECT_DOUBLE_EQ(io::overlap_ms(t), 5.0);
}

TEST(StreamBuild, BadInputs) {
  TempDir dir("stream");
  io::generate_random_walk(10, 64, 2, dir / "s.dsix");
  EXPECT_THROW(io::stream_build(dir / "s.dsix", make_params(128, 16, 8), {}), InputError);
  EXPECT_THROW(io::stream_build(dir / "missing.dsix", make_params(64, 16, 8), {}), FormatError);
}

TEST(DoubleBuffer, StatesFollowTheProtocol) {
  using S = io::DoubleBuffer::State;
  io::DoubleBuffer db(4, 2);
  auto area = db.acquire_for_fill(0);
  EXPECT_EQ(area.size(), 8u);
  EXPECT_EQ(db.state(0), S::kFilling);
  // The other buffer cannot start filling while this one is.
  EXPECT_THROW(db.acquire_for_fill(1), InvariantError);
  db.publish(0, 0, 4, 2);
  EXPECT_EQ(db.state(0), S::kProcessing);
  auto c = db.wait_chunk(0);
  ASSERT_TRUE(c.has_value());
  db.release(*c);
  EXPECT_EQ(db.state(0), S::kProcessing);
  db.release(*c);
  EXPECT_EQ(db.state(0), S::kIdle);
  EXPECT_THROW(db.release(*c), InvariantError);
  db.finish(1);
  EXPECT_FALSE(db.wait_chunk(1).has_value());
}

TEST(DoubleBuffer, WorkersNeverSeeAFillingBuffer) {
  const std::size_t chunks = 200, workers = 3;
  io::DoubleBuffer db(8, 4);
  std::atomic<int> violations{0};
  std::atomic<std::size_t> consumed{0};
  std::thread coordinator([&] {
    for (std::uint64_t seq = 0; seq < chunks; ++seq) {
      auto area = db.acquire_for_fill(seq);
      for (auto& v : area) v = static_cast<float>(seq);
      db.publish(seq, static_cast<SeriesId>(seq * 8), 8, workers);
    }
    db.finish(chunks);
  });
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t seq = 0;; ++seq) {
        auto c = db.wait_chunk(seq);
        if (!c) break;
        if (db.state(c->buffer) != io::DoubleBuffer::State::kProcessing) ++violations;
        for (float v : c->values) {
          if (v != static_cast<float>(seq)) ++violations;
        }
        ++consumed;
        db.release(*c);
      }
    });
  }
  coordinator.join();
  for (auto& t : pool) t.join();
  EXPECT_EQ(violations.load(), 0);
  EXPECT_EQ(consumed.load(), chunks * workers);
}

TEST(IndexFile, RoundTripPreservesTreeAndMeta) {
  TempDir dir("idx");
  const auto ds = io::generate_random_walk(8000, 64, 6);
  const auto tree = build(ds, make_params(64, 8, 8), {2, 100});
  io::save_index(dir / "t.dsxt", tree, {0x1234abcdull, 77});
  io::IndexFileMeta meta;
  const auto back = io::load_index(dir / "t.dsxt", &meta);
  EXPECT_EQ(meta.config_hash, 0x1234abcdull);
  EXPECT_EQ(meta.seed, 77u);
  EXPECT_EQ(back.params(), tree.params());
  EXPECT_EQ(back.leaf_capacity(), tree.leaf_capacity());
  EXPECT_EQ(back.size(), tree.size());
  EXPECT_EQ(leaf_contents(back), leaf_contents(tree));
  const auto q = ds[3];
  EXPECT_EQ(exact_search_tree(back, ds, q).series_id, 3u);
}

TEST(IndexFile, MisplacedEntryIsAnInvariantViolation) {
  TempDir dir("idx");
  const auto ds = io::generate_random_walk(4000, 64, 6);
  const auto tree = build(ds, make_params(64, 8, 8), {1, 100});
  // Flip the leading bit of segment 0 for the first entry of some leaf: the
  // entry now lies outside its root child's region.
  Node* node = tree.root_children()[0].node.get();
  while (!node->is_leaf()) node = node->children[0].get();
  ASSERT_GT(node->entries(), 0u);
  node->words[0] ^= 0x80;
  io::save_index(dir / "bad.dsxt", tree);
  EXPECT_THROW(io::load_index(dir / "bad.dsxt", nullptr, tree.size()), InvariantError);
}

TEST(IndexFile, CorruptBytesAreFormatErrors) {
  TempDir dir("idx");
  const auto ds = io::generate_random_walk(500, 64, 6);
  io::save_index(dir / "t.dsxt", build(ds, make_params(64, 8, 8), {1, 50}));
  auto b = read_bytes(dir / "t.dsxt");
  auto bad = b;
  bad[1] = 'Z';
  write_bytes(dir / "m.dsxt", bad);
  EXPECT_THROW(io::load_index(dir / "m.dsxt"), FormatError);
  bad = b;
  bad.resize(bad.size() / 2);
  write_bytes(dir / "t2.dsxt", bad);
  EXPECT_THROW(io::load_index(dir / "t2.dsxt"), FormatError);
  bad = b;
  bad.push_back(0);
  write_bytes(dir / "t3.dsxt", bad);
  EXPECT_THROW(io::load_index(dir / "t3.dsxt"), FormatError);
}

}  // namespace
}  // namespace dsidx
