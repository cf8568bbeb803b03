#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <random>

#include "mrfsim/uq_log.hpp"
#include "oracles.hpp"

using namespace mrfsim;

namespace {

std::vector<EvictionRecord> feed(LabelEntry& e, std::initializer_list<int> labels, std::uint32_t addr = 7) {
  std::vector<EvictionRecord> out;
  for (int l : labels)
    if (auto w = lmem_update(e, addr, l); w.record) out.push_back(*w.record);
  return out;
}

}  // namespace

TEST(LabelMemory, HitOnMrpIncrements) {
  LabelEntry e{{5, 3}, {2, 1}};
  EXPECT_TRUE(feed(e, {5}).empty());
  EXPECT_EQ(e, (LabelEntry{{5, 4}, {2, 1}}));
}

TEST(LabelMemory, HitOnLrpSwaps) {
  LabelEntry e{{5, 3}, {2, 1}};
  EXPECT_TRUE(feed(e, {2}).empty());
  EXPECT_EQ(e, (LabelEntry{{2, 2}, {5, 3}}));
}

TEST(LabelMemory, MissEvictsLrp) {
  LabelEntry e{{5, 3}, {2, 1}};
  const auto out = feed(e, {9});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (EvictionRecord{7, 2, 1}));
  EXPECT_EQ(e, (LabelEntry{{9, 1}, {5, 3}}));
}

TEST(LabelMemory, SaturationEmitsAndRestarts) {
  LabelEntry e{{5, 1023}, {2, 1}};
  const auto w = lmem_update(e, 7, 5);
  ASSERT_TRUE(w.record);
  EXPECT_EQ(w.kind, EvictionKind::Saturation);
  EXPECT_EQ(*w.record, (EvictionRecord{7, 5, 1023}));
  EXPECT_EQ(e, (LabelEntry{{5, 1}, {2, 1}}));
}

TEST(LabelMemory, EmptySlotsNeverEmit) {
  LabelEntry e(2);
  EXPECT_TRUE(feed(e, {4, 6}).empty());
  EXPECT_EQ(e, (LabelEntry{{6, 1}, {4, 1}}));
}

TEST(LabelMemory, OutsideCollectionOnlyTracksLabel) {
  LabelEntry e(2);
  EXPECT_FALSE(lmem_update(e, 0, 3, false).record);
  EXPECT_FALSE(lmem_update(e, 0, 4, false).record);
  EXPECT_EQ(e, (LabelEntry{{4, 0}, {0, 0}}));
  // first collected update of the same label starts at 1 without emitting
  EXPECT_FALSE(lmem_update(e, 0, 4).record);
  EXPECT_EQ(e.slots[0], (LabelSlot{4, 1}));
}

TEST(LabelMemory, MatchesTwoPairTransliteration) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int alphabet = 1 + static_cast<int>(rng() % 5);
    const int len = 1 + static_cast<int>(rng() % 4000);
    const bool sticky = trial % 3 == 0;  // long runs reach saturation
    oracle::PairEntry ref;
    LabelEntry e(2);
    if (trial % 2) {
      ref = {static_cast<int>(rng() % 8), static_cast<int>(rng() % 1024), static_cast<int>(rng() % 8), static_cast<int>(rng() % 1024)};
      if (ref.mrp_lbl == ref.lrp_lbl) ref.lrp_lbl = (ref.lrp_lbl + 1) % 8;
      e = LabelEntry{{static_cast<std::uint8_t>(ref.mrp_lbl), static_cast<std::uint16_t>(ref.mrp_cnt)},
                     {static_cast<std::uint8_t>(ref.lrp_lbl), static_cast<std::uint16_t>(ref.lrp_cnt)}};
    }
    std::vector<oracle::PairMsg> ref_out;
    std::vector<EvictionRecord> out;
    int label = 0;
    for (int i = 0; i < len; ++i) {
      if (!sticky || rng() % 500 == 0) label = static_cast<int>(rng() % static_cast<unsigned>(alphabet));
      oracle::pair_memory_write(ref, 3, label, ref_out);
      if (auto w = lmem_update(e, 3, label); w.record) out.push_back(*w.record);
    }
    std::vector<EvictionRecord> expected;
    for (auto m : ref_out)
      if (m.cnt > 0) expected.push_back({m.addr, static_cast<std::uint8_t>(m.lbl), static_cast<std::uint16_t>(m.cnt)});
    ASSERT_EQ(out, expected) << "trial " << trial;
    EXPECT_EQ(e, (LabelEntry{{static_cast<std::uint8_t>(ref.mrp_lbl), static_cast<std::uint16_t>(ref.mrp_cnt)},
                             {static_cast<std::uint8_t>(ref.lrp_lbl), static_cast<std::uint16_t>(ref.lrp_cnt)}}));
  }
}

TEST(LabelMemory, CountsAreConservedForAnyCapacity) {
  std::mt19937 rng(23);
  for (int pairs = 1; pairs <= kMaxLmemPairs; ++pairs) {
    LabelEntry e(pairs);
    std::map<int, std::uint64_t> truth;
    std::vector<EvictionRecord> out;
    for (int i = 0; i < 20000; ++i) {
      const int l = rng() % 4 == 0 ? static_cast<int>(rng() % 12) : 1;
      ++truth[l];
      if (auto w = lmem_update(e, 0, l); w.record) out.push_back(*w.record);
    }
    const auto res = flush_residuals(std::span<const LabelEntry>(&e, 1));
    out.insert(out.end(), res.begin(), res.end());
    const auto h = reconstruct_histogram(out);
    for (auto [l, n] : truth) EXPECT_EQ(h.count(0, l), n) << "pairs " << pairs;
    EXPECT_EQ(h.total(0), 20000u);
  }
}

TEST(LabelMemory, FlushSkipsEmptySlots) {
  std::vector<LabelEntry> mem{LabelEntry{{1, 4}, {2, 0}}, LabelEntry{{3, 0}, {0, 0}}, LabelEntry{{5, 2}, {6, 9}}};
  const auto r = flush_residuals(mem);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], (EvictionRecord{0, 1, 4}));
  EXPECT_EQ(r[1], (EvictionRecord{2, 5, 2}));
  EXPECT_EQ(r[2], (EvictionRecord{2, 6, 9}));
}

namespace {
std::vector<TaggedRecord> tagged(int n, int spes, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::vector<TaggedRecord> v;
  for (int i = 0; i < n; ++i)
    v.push_back({{static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(rng() % 64), static_cast<std::uint16_t>(1 + rng() % 1023)},
                 static_cast<std::uint32_t>(rng() % static_cast<unsigned>(spes)), rng() % 50});
  return v;
}
}  // namespace

TEST(Transport, PacksSixteenRecordsPerLine) {
  auto r = transport(tagged(16, 16), 4, 64);
  EXPECT_EQ(r.log.lines().size(), 1u);
  EXPECT_EQ(r.log.index(), 16u);
  r = transport(tagged(17, 16), 4, 64);
  EXPECT_EQ(r.log.lines().size(), 2u);
  EXPECT_EQ(r.log.index(), 17u);
  EXPECT_EQ(r.log.bytes(), 128u);
  r = transport({}, 4, 64);
  EXPECT_EQ(r.log.index(), 0u);
  EXPECT_TRUE(r.log.lines().empty());
}

TEST(Transport, ConservesRecordsForAnyFabric) {
  for (int d : {1, 2, 3, 4, 8}) {
    const auto in = tagged(3000, d * d, static_cast<std::uint64_t>(d));
    const auto r = transport(in, d, 4);
    std::vector<EvictionRecord> a, b = r.log.records();
    for (const auto& t : in) a.push_back(t.record);
    EXPECT_EQ(reconstruct_histogram(a), reconstruct_histogram(b)) << "D=" << d;
    EXPECT_EQ(r.stats.records, 3000u);
  }
}

TEST(Transport, ShallowFifosReportBackpressure) {
  std::vector<TaggedRecord> burst;
  for (int i = 0; i < 500; ++i) burst.push_back({{static_cast<std::uint32_t>(i), 1, 1}, 0, 0});
  EXPECT_GT(transport(burst, 4, 2).stats.backpressure_events, 0u);
  EXPECT_EQ(transport(burst, 4, 1000).stats.backpressure_events, 0u);
}

TEST(Reconstruct, AdditiveOverConcatenation) {
  const auto in = tagged(400, 4);
  std::vector<EvictionRecord> a, b, ab;
  for (std::size_t i = 0; i < in.size(); ++i) {
    (i < 150 ? a : b).push_back(in[i].record);
    ab.push_back(in[i].record);
  }
  auto ha = reconstruct_histogram(a), hb = reconstruct_histogram(b), hab = reconstruct_histogram(ab);
  for (std::uint32_t rv = 0; rv < 400; ++rv)
    for (int l = 0; l < 64; ++l) ASSERT_EQ(hab.count(rv, l), ha.count(rv, l) + hb.count(rv, l));
}

TEST(Reconstruct, RejectsMalformedInput) {
  EXPECT_THROW((void)reconstruct_histogram(std::vector<EvictionRecord>{{0, 1, 0}}), std::runtime_error);
  EXPECT_THROW((void)reconstruct_histogram(std::vector<EvictionRecord>{{0, 1, 1024}}), std::runtime_error);
  DramLog bad({}, 3);
  EXPECT_THROW((void)reconstruct_histogram(bad), std::runtime_error);
  EXPECT_TRUE(reconstruct_histogram(DramLog{}).empty());
}

TEST(Histogram, DenseRoundTrip) {
  const std::vector<std::uint32_t> dense{0, 3, 1, 0, 0, 7};
  const auto h = Histogram::from_dense(dense, 3);
  EXPECT_EQ(h.count(1, 2), 7u);
  EXPECT_EQ(h.total(0), 4u);
  EXPECT_EQ(h.to_dense(2, 3), dense);
  EXPECT_THROW((void)h.to_dense(1, 3), std::out_of_range);
}

TEST(UqStats, Examples) {
  const std::vector<int> peaked{0, 0, 10, 0};
  auto s = uq_stats(std::span<const int>(peaked));
  EXPECT_EQ(s.mode, 2);
  EXPECT_DOUBLE_EQ(s.top1, 1.0);
  EXPECT_DOUBLE_EQ(s.entropy, 0.0);
  const std::vector<int> flat{5, 5, 5, 5};
  s = uq_stats(std::span<const int>(flat));
  EXPECT_EQ(s.mode, 0);
  EXPECT_DOUBLE_EQ(s.top1, 0.25);
  EXPECT_NEAR(s.entropy, 1.0, 1e-12);
  const std::vector<int> empty{0, 0};
  EXPECT_THROW((void)uq_stats(std::span<const int>(empty)), std::invalid_argument);
}

TEST(LogFile, RecordBitLayout) {
  const EvictionRecord r{0xDEADBEEF, 0x2A, 0x3FF};
  const std::uint64_t w = pack_record(r);
  EXPECT_EQ(w & 0xFFFFFFFFu, 0xDEADBEEFu);
  EXPECT_EQ((w >> 32) & 0x3F, 0x2Au);
  EXPECT_EQ((w >> 38) & 0x3FF, 0x3FFu);
  EXPECT_EQ(w >> 48, 0u);
  EXPECT_EQ(unpack_record(w), r);
  EXPECT_THROW((void)unpack_record(w | (1ull << 50)), std::runtime_error);
}

TEST(LogFile, HeaderBytes) {
  const std::vector<EvictionRecord> one{{1, 2, 3}};
  const auto b = encode_log(one);
  ASSERT_EQ(b.size(), 14u + 8u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "MRFL");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 1);
  EXPECT_EQ(b[14], 1);  // address LSB first
}

TEST(LogFile, RoundTripProperty) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EvictionRecord> recs;
    const int n = static_cast<int>(rng() % 500);
    for (int i = 0; i < n; ++i)
      recs.push_back({static_cast<std::uint32_t>(rng()), static_cast<std::uint8_t>(rng() % 64), static_cast<std::uint16_t>(rng() % 1024)});
    EXPECT_EQ(decode_log(encode_log(recs)), recs);
  }
}

TEST(LogFile, FileRoundTripAndErrors) {
  const auto path = (std::filesystem::temp_directory_path() / "mrfsim_test_log.mrfl").string();
  const std::vector<EvictionRecord> recs{{0, 1, 5}, {9, 63, 1023}};
  write_log_file(path, recs);
  EXPECT_EQ(read_log_file(path), recs);
  std::filesystem::remove(path);
  EXPECT_THROW((void)read_log_file(path), std::runtime_error);

  auto bytes = encode_log(recs);
  bytes[0] = 'X';
  EXPECT_THROW((void)decode_log(bytes), std::runtime_error);
  bytes = encode_log(recs);
  bytes.pop_back();
  EXPECT_THROW((void)decode_log(bytes), std::runtime_error);
  bytes = encode_log(recs);
  bytes[4] = 2;
  EXPECT_THROW((void)decode_log(bytes), std::runtime_error);
  EXPECT_TRUE(decode_log(encode_log({})).empty());
}

namespace {
LabelTrace trace_of(const std::vector<std::vector<std::uint8_t>>& frames, int w, int h, int labels) {
  LabelTrace t;
  t.width = w;
  t.height = h;
  t.labels = labels;
  for (const auto& f : frames) t.append(f);
  return t;
}
}  // namespace

TEST(TraceSweep, ConstantTraceOnlySaturates) {
  std::vector<std::vector<std::uint8_t>> frames(3000, std::vector<std::uint8_t>{4});
  const auto p = trace_lmem_sim(trace_of(frames, 1, 1, 8), 2);
  EXPECT_EQ(p.capacity_evictions, 0u);
  EXPECT_EQ(p.saturation_evictions, 2u);  // at updates 1024 and 2047
}

TEST(TraceSweep, ThrashingWithOnePair) {
  std::vector<std::vector<std::uint8_t>> frames;
  for (int i = 0; i < 100; ++i) frames.push_back({static_cast<std::uint8_t>(i % 2)});
  const auto t = trace_of(frames, 1, 1, 2);
  EXPECT_EQ(trace_lmem_sim(t, 1).capacity_evictions, 99u);
  EXPECT_EQ(trace_lmem_sim(t, 2).capacity_evictions, 0u);
  EXPECT_DOUBLE_EQ(trace_lmem_sim(t, 1).max_rate, 1.0);
}

TEST(TraceSweep, CapacityEvictionsNonIncreasingInPairs) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 16;
    std::vector<std::vector<std::uint8_t>> frames;
    std::vector<std::uint8_t> cur(n, 0);
    for (int f = 0; f < 300; ++f) {
      for (auto& v : cur)
        if (rng() % 4 == 0) v = static_cast<std::uint8_t>(rng() % 10);
      frames.push_back(cur);
    }
    const auto t = trace_of(frames, 4, 4, 10);
    std::uint64_t prev = UINT64_MAX;
    for (int p = 1; p <= 8; ++p) {
      const auto c = trace_lmem_sim(t, p).capacity_evictions;
      EXPECT_LE(c, prev);
      prev = c;
    }
  }
}

TEST(UniqueLabels, CdfExamples) {
  const auto t = trace_of({{0, 1, 2}, {0, 2, 2}, {0, 3, 2}}, 3, 1, 4);
  const auto cdf = unique_label_cdf(t, 0, 3);
  ASSERT_EQ(cdf.size(), 4u);
  EXPECT_NEAR(cdf[0], 2.0 / 3, 1e-12);
  EXPECT_NEAR(cdf[1], 2.0 / 3, 1e-12);
  EXPECT_NEAR(cdf[2], 1.0, 1e-12);
  EXPECT_NEAR(unique_label_cdf(t, 1, 2)[0], 1.0, 1e-12);
  EXPECT_THROW((void)unique_label_cdf(t, 2, 2), std::invalid_argument);
}

TEST(TraceFile, RoundTrip) {
  const auto t = trace_of({{0, 1, 2}, {3, 2, 1}}, 3, 1, 4);
  const auto path = (std::filesystem::temp_directory_path() / "mrfsim_test_trace.mrft").string();
  write_trace_file(path, t);
  const auto u = read_trace_file(path);
  EXPECT_EQ(u.frames, t.frames);
  EXPECT_EQ(u.width, 3);
  EXPECT_EQ(u.labels, 4);
  std::filesystem::remove(path);
}
