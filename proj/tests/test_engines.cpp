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

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "support.hpp"

namespace dsidx {
namespace {

using testing::close_rel;
using testing::naive_nn;

SummaryParams make_params(std::size_t n, std::size_t w, unsigned bits) {
  SummaryParams p;
  p.length = n;
  p.segments = w;
  p.max_card_bits = bits;
  return p;
}

TEST(Bsf, RejectsLargerAcceptsSmaller) {
  SharedBsf bsf;
  EXPECT_TRUE(bsf_update(bsf, 4.0, 7));
  EXPECT_FALSE(bsf_update(bsf, 5.0, 1));
  EXPECT_EQ(bsf.snapshot().distance_sq, 4.0);
  EXPECT_EQ(bsf.snapshot().id, 7u);
  EXPECT_TRUE(bsf_update(bsf, 3.0, 9));
  EXPECT_EQ(bsf.load(), 3.0);
}

TEST(Bsf, TieGoesToLowerId) {
  SharedBsf bsf(2.0, 10);
  EXPECT_FALSE(bsf_update(bsf, 2.0, 11));
  EXPECT_TRUE(bsf_update(bsf, 2.0, 3));
  EXPECT_EQ(bsf.snapshot().id, 3u);
  EXPECT_FALSE(bsf_update(bsf, 2.0, 3));
}

TEST(Bsf, TwoConcurrentUpdatesAnyInterleaving) {
  // Both sequential orders, then many racing runs.
  for (bool first_small : {true, false}) {
    SharedBsf bsf;
    bsf_update(bsf, first_small ? 3.0 : 5.0, first_small ? 2 : 1);
    bsf_update(bsf, first_small ? 5.0 : 3.0, first_small ? 1 : 2);
    EXPECT_EQ(bsf.snapshot().distance_sq, 3.0);
  }
  for (int run = 0; run < 500; ++run) {
    SharedBsf bsf;
    std::atomic<bool> go{false};
    std::thread a([&] { while (!go) {} bsf_update(bsf, 5.0, 1); });
    std::thread b([&] { while (!go) {} bsf_update(bsf, 3.0, 2); });
    go = true;
    a.join();
    b.join();
    ASSERT_EQ(bsf.snapshot().distance_sq, 3.0);
    ASSERT_EQ(bsf.snapshot().id, 2u);
  }
}

TEST(Bsf, HistoryIsMonotone) {
  SharedBsf bsf;
  bsf.keep_history(true);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      std::mt19937_64 rng(t);
      for (int i = 0; i < 20000; ++i) bsf_update(bsf, static_cast<double>(rng() % 100000), static_cast<SeriesId>(rng() % 1000));
    });
  }
  for (auto& th : threads) th.join();
  const auto h = bsf.history();
  ASSERT_FALSE(h.empty());
  for (std::size_t i = 1; i < h.size(); ++i) {
    EXPECT_TRUE(h[i].distance_sq < h[i - 1].distance_sq ||
                (h[i].distance_sq == h[i - 1].distance_sq && h[i].id < h[i - 1].id));
  }
  EXPECT_EQ(h.back().distance_sq, bsf.load());
}

TEST(PriorityQueues, PopReturnsMinimum) {
  PriorityQueueSet<int> qs(2);
  for (int v : {5, 1, 9, 3, 7}) qs.push(0, v, v);
  std::vector<int> order;
  while (auto e = qs.pop(0)) order.push_back(e->value);
  EXPECT_EQ(order, (std::vector<int>{1, 3, 5, 7, 9}));
  EXPECT_FALSE(qs.pop(1).has_value());
}

TEST(PriorityQueues, BalancedInsertionUnderContention) {
  PriorityQueueSet<int> qs(8);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      std::mt19937_64 rng(t);
      for (int i = 0; i < 5000; ++i) qs.push_balanced(static_cast<double>(rng() % 1000), i, rng);
    });
  }
  for (auto& th : threads) th.join();
  const auto sizes = qs.sizes();
  const double mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / 8.0;
  EXPECT_EQ(mean, 5000.0);
  EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()), 1.1 * mean);

  // Concurrent drains see every element exactly once, each queue in order.
  std::atomic<std::size_t> popped{0};
  threads.clear();
  for (std::size_t q = 0; q < 8; ++q) {
    threads.emplace_back([&, q] {
      double last = -1;
      while (auto e = qs.pop(q)) {
        EXPECT_GE(e->key, last);
        last = e->key;
        ++popped;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(popped.load(), 40000u);
}

TEST(Channel, BoundedHandOff) {
  BoundedChannel<int> ch(4);
  std::thread producer([&] {
    for (int i = 0; i < 1000; ++i) ch.push(i);
    ch.close();
  });
  long sum = 0;
  int expect = 0;
  while (auto v = ch.pop()) {
    EXPECT_EQ(*v, expect++);
    sum += *v;
  }
  producer.join();
  EXPECT_EQ(sum, 999L * 1000 / 2);
  EXPECT_LE(ch.high_water(), 4u);
  EXPECT_FALSE(ch.push(1));
}

TEST(BruteForce, FindsItselfAndBreaksTiesLow) {
  const auto ds = io::generate_random_walk(200, 32, 1);
  const auto r = brute_force(ds, ds[17]);
  EXPECT_EQ(r.series_id, 17u);
  EXPECT_EQ(r.distance, 0.0);

  Dataset tie(2);
  tie.append(std::vector<float>{1, 0});
  tie.append(std::vector<float>{9, 9});
  tie.append(std::vector<float>{-1, 0});
  tie.append(std::vector<float>{1, 0});
  const std::vector<float> q{0, 0};
  const auto t = brute_force(tie, q, 3);
  EXPECT_EQ(t.series_id, 0u);
  EXPECT_EQ(t.distance, 1.0);
}

TEST(BruteForce, MatchesIndependentScan) {
  const auto ds = testing::gaussian_dataset(1000, 64, 5);
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 30; ++rep) {
    const auto q = testing::gaussian_series(64, rng);
    const auto oracle = naive_nn(ds, q);
    for (std::size_t w : {1u, 4u}) {
      const auto r = brute_force(ds, q, w);
      EXPECT_EQ(r.series_id, oracle.id);
      EXPECT_TRUE(close_rel(r.distance, oracle.distance, 1e-6));
    }
  }
}

TEST(BruteForce, Errors) {
  const std::vector<float> q(8, 0.0f);
  EXPECT_THROW(brute_force(Dataset(8), q), InputError);
  EXPECT_THROW(brute_force(io::generate_random_walk(3, 4, 1), q), InputError);
}

class EngineFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    params_ = make_params(128, 16, 8);
    data_ = new Dataset(io::generate_random_walk(20000, 128, 42));
    tree_ = new IndexTree(build(*data_, params_, {2, 200}));
    flat_ = new FlatArrays(flatten(*tree_));
    const auto derived = io::derive_queries(*data_, 50, 0.1, 7);
    const auto walks = io::generate_random_walk(50, 128, 4242);
    queries_ = new Dataset(128);
    for (std::size_t i = 0; i < 50; ++i) queries_->append(derived[i]);
    for (std::size_t i = 0; i < 50; ++i) queries_->append(walks[i]);
  }
  static void TearDownTestSuite() {
    delete queries_;
    delete flat_;
    delete tree_;
    delete data_;
  }

  static SummaryParams params_;
  static Dataset* data_;
  static IndexTree* tree_;
  static FlatArrays* flat_;
  static Dataset* queries_;
};

SummaryParams EngineFixture::params_;
Dataset* EngineFixture::data_ = nullptr;
IndexTree* EngineFixture::tree_ = nullptr;
FlatArrays* EngineFixture::flat_ = nullptr;
Dataset* EngineFixture::queries_ = nullptr;

TEST_F(EngineFixture, ApproximateIsAnUpperBound) {
  for (std::size_t i = 0; i < queries_->size(); ++i) {
    const auto q = (*queries_)[i];
    const auto approx = approximate_search(*tree_, *data_, q);
    const auto oracle = naive_nn(*data_, q);
    EXPECT_GE(approx.distance, oracle.distance * (1 - 1e-6));
    EXPECT_GT(approx.distances_computed, 0u);
  }
}

TEST_F(EngineFixture, ApproximateFindsPlantedDuplicate) {
  const auto& table = BreakpointTable::shared(8);
  for (SeriesId id : {0u, 123u, 19999u}) {
    const auto q = prepare_query((*data_)[id], params_, table);
    const Node* leaf = approximate_leaf(*tree_, q, table);
    ASSERT_NE(std::find(leaf->ids.begin(), leaf->ids.end(), id), leaf->ids.end());
    const auto approx = approximate_search(*tree_, *data_, q, table);
    EXPECT_EQ(approx.distance, 0.0);
  }
}

TEST(Approximate, SingleLeafTreeIsExact) {
  // Shifting every value up keeps all segment means in the top region, so
  // with w=1 the whole collection lands in one leaf.
  const auto ds = io::generate_random_walk(500, 64, 3);
  const auto queries = io::generate_random_walk(30, 64, 8);
  const auto p = make_params(64, 1, 8);
  Dataset shifted(64);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<float> s(ds[i].begin(), ds[i].end());
    for (auto& v : s) v += 5.0f;
    shifted.append(s);
  }
  const auto one = build(shifted, p, {1, 1000});
  ASSERT_EQ(one.leaf_count(), 1u);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    std::vector<float> q(queries[i].begin(), queries[i].end());
    for (auto& v : q) v += 5.0f;
    const auto approx = approximate_search(one, shifted, q);
    const auto exact = brute_force(shifted, q);
    EXPECT_EQ(approx.series_id, exact.series_id);
    EXPECT_EQ(approx.distance, exact.distance);
  }
}

TEST_F(EngineFixture, AllEnginesMatchOracle) {
  for (std::size_t i = 0; i < queries_->size(); ++i) {
    const auto q = (*queries_)[i];
    const auto oracle = naive_nn(*data_, q);
    const auto bf = brute_force(*data_, q);
    ASSERT_EQ(bf.series_id, oracle.id);
    for (std::size_t w : {1u, 8u}) {
      const auto a = exact_search_tree(*tree_, *data_, q, {.workers = w, .seed = i});
      const auto b = exact_search_flatscan(*tree_, flat_->sax, *data_, q, {.workers = w});
      const auto c = exact_search_batched(flat_->leaf_ordered, *tree_, *data_, q, {.workers = w});
      for (const auto* r : {&a, &b, &c}) {
        EXPECT_EQ(r->series_id, oracle.id) << "query " << i << " workers " << w;
        EXPECT_TRUE(close_rel(r->distance, oracle.distance)) << "query " << i;
        EXPECT_EQ(r->distance, bf.distance);
        EXPECT_GE(r->stats.initial_bsf, r->distance);
        EXPECT_LE(r->stats.real_distances, data_->size());
      }
    }
  }
}

TEST_F(EngineFixture, ZeroInitialBsfPrunesEverything) {
  for (SeriesId id : {5u, 777u, 15000u}) {
    const auto q = (*data_)[id];
    const auto r = exact_search_tree(*tree_, *data_, q, {.workers = 4});
    EXPECT_EQ(r.stats.initial_bsf, 0.0);
    EXPECT_EQ(r.series_id, id);
    EXPECT_EQ(r.stats.real_distances, r.stats.init_distances);
    std::size_t queued = 0;
    for (auto s : r.stats.queue_sizes) queued += s;
    EXPECT_EQ(queued, 0u);
  }
}

TEST_F(EngineFixture, CandidateListKeepsTheAnswer) {
  const auto& table = BreakpointTable::shared(8);
  for (std::size_t i = 0; i < queries_->size(); ++i) {
    const auto q = prepare_query((*queries_)[i], params_, table);
    const auto approx = approximate_search(*tree_, *data_, q, table);
    const auto oracle = naive_nn(*data_, q.series());
    const auto list = build_candidate_list(flat_->sax, q.paa, approx.distance_sq, params_, table, 3, 500);
    const bool has = std::any_of(list.begin(), list.end(), [&](const Candidate& c) { return c.id == oracle.id; });
    EXPECT_TRUE(has || approx.series_id == oracle.id) << "query " << i;
    for (const auto& c : list) EXPECT_LT(c.bound_sq, approx.distance_sq);
  }
}

TEST(FlatScan, InfiniteBsfKeepsEverything) {
  const auto ds = io::generate_random_walk(3000, 64, 2);
  const auto p = make_params(64, 4, 8);
  const auto tree = build(ds, p, {1, 100});
  const auto flat = flatten(tree);
  const auto& table = BreakpointTable::shared(8);
  const auto q = prepare_query(ds[0], p, table);
  const auto list = build_candidate_list(flat.sax, q.paa, INFINITY, p, table, 4, 64);
  EXPECT_EQ(list.size(), ds.size());

  // Identical series: every word equal, nothing prunable at any BSF above 0.
  Dataset same(64);
  for (int i = 0; i < 100; ++i) same.append(ds[1]);
  const auto t2 = build(same, p, {1, 10});
  const auto f2 = flatten(t2);
  const auto q2 = prepare_query(ds[1], p, table);
  EXPECT_EQ(build_candidate_list(f2.sax, q2.paa, INFINITY, p, table, 2, 7).size(), 100u);
}

TEST(Batched, OnlyTheQueryRangeIsScanned) {
  const std::size_t n = 64;
  std::mt19937_64 rng(13);
  std::normal_distribution<double> noise(0, 0.01);
  auto pattern = [&](float sign) {
    std::vector<float> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = sign * (i < n / 2 ? -1.0f : 1.0f) + static_cast<float>(noise(rng));
    return s;
  };
  Dataset ds(n);
  for (int i = 0; i < 3000; ++i) ds.append(pattern(i % 3 == 0 ? -1.0f : 1.0f));
  const auto p = make_params(n, 4, 8);
  const auto tree = build(ds, p, {1, 100});
  ASSERT_EQ(tree.root_children().size(), 2u);
  const auto flat = flatten(tree);
  const auto q = pattern(1.0f);
  const auto& table = BreakpointTable::shared(8);
  const SubtreeId own = root_subtree_of(prepare_query(q, p, table).word, 8);
  std::size_t own_len = 0;
  for (const auto& r : flat.leaf_ordered.ranges) {
    if (r.subtree == own) own_len = r.length;
  }
  for (std::size_t block : {1u, 4096u}) {
    const auto r = exact_search_batched(flat.leaf_ordered, tree, ds, q, {.workers = 2, .block_size = block});
    EXPECT_EQ(r.stats.ranges_total, 2u);
    EXPECT_EQ(r.stats.ranges_scanned, 1u);
    EXPECT_EQ(r.stats.lower_bounds - r.stats.ranges_total, own_len);
    EXPECT_EQ(r.series_id, brute_force(ds, q).series_id);
  }
}

TEST_F(EngineFixture, BlockSizeDoesNotChangeResults) {
  for (std::size_t i = 0; i < 30; ++i) {
    const auto q = (*queries_)[i * 3];
    const auto a = exact_search_batched(flat_->leaf_ordered, *tree_, *data_, q, {.workers = 3, .block_size = 1});
    const auto b = exact_search_batched(flat_->leaf_ordered, *tree_, *data_, q, {.workers = 3, .block_size = 4096});
    EXPECT_EQ(a.series_id, b.series_id);
    EXPECT_EQ(a.distance, b.distance);
  }
}

TEST_F(EngineFixture, QueueSizesBalancedAcrossQueries) {
  std::vector<std::size_t> total(8, 0);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto r = exact_search_tree(*tree_, *data_, (*queries_)[50 + i], {.workers = 8, .seed = i});
    ASSERT_EQ(r.stats.queue_sizes.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) total[k] += r.stats.queue_sizes[k];
  }
  const double mean = std::accumulate(total.begin(), total.end(), 0.0) / 8.0;
  ASSERT_GT(mean, 0.0);
  EXPECT_LE(*std::max_element(total.begin(), total.end()), 1.1 * mean);
}

TEST_F(EngineFixture, ConcurrentQueriesOnSharedIndex) {
  std::vector<std::thread> threads;
  std::atomic<int> wrong{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = static_cast<std::size_t>(t); i < 40; i += 4) {
        const auto q = (*queries_)[i];
        const auto expect = brute_force(*data_, q);
        const auto a = exact_search_tree(*tree_, *data_, q, {.workers = 2});
        const auto c = exact_search_batched(flat_->leaf_ordered, *tree_, *data_, q, {.workers = 2});
        if (a.series_id != expect.series_id || c.series_id != expect.series_id) ++wrong;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(wrong.load(), 0);
}

TEST(Engines, QueryLengthMismatch) {
  const auto ds = io::generate_random_walk(100, 64, 1);
  const auto tree = build(ds, make_params(64, 4, 8), {1, 50});
  const std::vector<float> q(32, 0.0f);
  EXPECT_THROW(exact_search_tree(tree, ds, q), InputError);
}

}  // namespace
}  // namespace dsidx
