#include <gtest/gtest.h>

#include <set>

#include "qcf/catalog.hpp"

using namespace qcf;

namespace {

const std::vector<ParamPoint>& points() {
  static const std::vector<ParamPoint> pts = sample_params(0, 3);
  return pts;
}

std::string describe(const IdentityReport& r) {
  return r.id + " " + params_text(r.params) + " status=" + to_string(r.status) + " " + r.comparison + " " + r.reason;
}

}  // namespace

TEST(Registry, Contents) {
  const auto& reg = register_all();
  EXPECT_GE(reg.size(), 27u);
  std::set<std::string> ids;
  for (const auto& e : reg) {
    EXPECT_TRUE(ids.insert(e.id).second) << "duplicate id " << e.id;
    EXPECT_FALSE(e.title.empty());
    EXPECT_EQ(is_cf_kind(e.kind), e.cf.has_value()) << e.id;
  }
  for (const char* id : {"RR_CF", "RR_SPECIAL", "G_CFRAC_g2", "G_CFRAC_g1", "G_CFRAC_g3", "HEINE_CF", "RAMANUJAN_G1",
                         "RAMANUJAN_G2", "HIRSCHHORN", "HEINE_CF_A", "EISENSTEIN", "ENTRY8", "ENTRY8_D0", "ENTRY6",
                         "QBIN", "GFRAC_SUMS2", "GFRAC5_SUMS", "gFRAC_SUMS2", "PROD_RATIO", "ENTRY11",
                         "ENTRY11_SUMRATIO", "REC_RR", "REC_G1", "REC_G2", "REC_GG2", "REC_G1AB", "REC_C", "POCH_IDS"})
    EXPECT_TRUE(ids.count(id)) << id;
  ASSERT_NE(lookup("RR_CF"), nullptr);
  EXPECT_EQ(lookup("RR_CF")->kind, Kind::cf_equals_series_ratio);
  EXPECT_EQ(lookup("NOPE"), nullptr);
  for (const auto& e : reg)
    for (const auto& l : e.links) EXPECT_NE(lookup(l.target_id), nullptr) << link_id(e, l);
}

TEST(Verify, ListedExamples) {
  const IdentityReport rr = verify("RR_CF", ParamPoint{1, 0, 0}, 40, 10);
  EXPECT_EQ(rr.status, Status::pass) << describe(rr);
  const IdentityReport qbin = verify("QBIN", ParamPoint{make_rational(1, 3), make_rational(1, 5), 0}, 40, 8);
  EXPECT_EQ(qbin.status, Status::pass) << describe(qbin);
  const IdentityReport prod = verify("PROD_RATIO", ParamPoint{}, 40, 12);
  EXPECT_EQ(prod.status, Status::pass) << describe(prod);
  EXPECT_FALSE(prod.params);
  EXPECT_THROW(verify("NOPE", ParamPoint{}, 40, 8), QcfError);
}

TEST(Verify, EveryEntryAtSamplePoints) {
  for (const auto& e : register_all()) {
    for (const auto& p : points()) {
      const IdentityReport r = verify(e, p, 40, 8);
      EXPECT_NE(r.status, Status::fail) << describe(r);
      if (e.parameter_free) break;
    }
  }
}

TEST(Verify, ContactFloorForFractions) {
  for (const auto& e : register_all()) {
    if (!e.cf) continue;
    const ParamPoint p = points()[1];
    for (int depth : {1, 4, 8}) {
      const Comparison c = cf_comparison(e, p, 40, depth);
      EXPECT_GE(c.through, std::min(40, depth)) << e.id << " depth " << depth;
      const auto mm = first_mismatch(c.lhs, c.rhs);
      if (mm) {
        EXPECT_GE(*mm, std::min(41, depth + 1)) << e.id << " depth " << depth;
      }
    }
  }
}

TEST(Verify, ConstraintSkips) {
  const IdentityReport r = verify("ENTRY11", ParamPoint{2, 2, 1}, 30, 8);
  EXPECT_EQ(r.status, Status::skipped);
  EXPECT_FALSE(r.reason.empty());
  EXPECT_FALSE(r.first_mismatch_power);
}

TEST(Verify, DegeneratePointsSkipOrPass) {
  // zero parameters, and b = -l where g-cfrac3's first numerator vanishes
  for (const ParamPoint& p : {ParamPoint{0, 0, 0}, ParamPoint{1, 0, 0}, ParamPoint{0, 1, 1}, ParamPoint{1, -1, 1},
                              ParamPoint{-1, -1, -1}}) {
    for (const auto& e : register_all()) {
      EXPECT_NE(verify(e, p, 24, 6).status, Status::fail) << describe(verify(e, p, 24, 6));
      for (const auto& l : e.links) {
        const IdentityReport r = check_reduction(e, l, p, 24, 6);
        EXPECT_NE(r.status, Status::fail) << describe(r);
      }
    }
  }
  const IdentityReport d0 = verify("ENTRY8_D0", ParamPoint{1, 0, 1}, 24, 6);
  EXPECT_EQ(d0.status, Status::skipped);
  EXPECT_EQ(verify("GFRAC5_SUMS", ParamPoint{0, 1, 1}, 24, 6).status, Status::skipped);
  const IdentityReport finite = verify("RR_CF", ParamPoint{0, 0, 0}, 24, 6);
  EXPECT_EQ(finite.status, Status::pass) << describe(finite);
}

TEST(Verify, PerturbationFails) {
  const IdentityReport r = verify("RR_CF", ParamPoint{1, 0, 0}, 40, 10, Perturbation{2, 1});
  EXPECT_EQ(r.status, Status::fail);
  ASSERT_TRUE(r.first_mismatch_power);
  EXPECT_EQ(*r.first_mismatch_power, 3);
  EXPECT_FALSE(r.dump.empty());
}

TEST(Reduction, ListedLinks) {
  for (const auto& [a, b] : {std::pair{"G_CFRAC_g2", "RR_CF"}, std::pair{"RAMANUJAN_G1", "G_CFRAC_g1"},
                             std::pair{"HIRSCHHORN", "G_CFRAC_g3"}}) {
    for (const auto& p : points()) {
      const IdentityReport r = check_reduction(a, b, p, 40, 8);
      EXPECT_EQ(r.status, Status::pass) << describe(r);
      EXPECT_EQ(r.id, std::string(a) + "->" + b);
    }
  }
  EXPECT_THROW(check_reduction("RR_CF", "QBIN", points()[0], 40, 8), QcfError);
}

TEST(Reduction, EveryLinkPasses) {
  for (const auto& e : register_all())
    for (const auto& l : e.links) {
      const IdentityReport r = check_reduction(e, l, points()[2], 40, 8);
      EXPECT_EQ(r.status, Status::pass) << describe(r);
    }
}

TEST(Chain, Entry8SpecialisationsImplyGRatio) {
  for (const auto& p : points()) {
    for (const char* id : {"ENTRY8", "ENTRY8_D0", "GFRAC_SUMS2"}) {
      const IdentityReport r = verify(id, p, 40, 8);
      EXPECT_EQ(r.status, Status::pass) << describe(r);
    }
  }
}

TEST(VerifyAll, DefaultRunPasses) {
  const RunReport rr = verify_all(0, 3, 40, 8);
  EXPECT_EQ(rr.summary.fail, 0);
  EXPECT_GT(rr.summary.pass, 80);
  EXPECT_EQ(rr.summary, summarize(rr.reports));
  for (const auto& r : rr.reports) EXPECT_NE(r.status, Status::fail) << describe(r);
  for (std::size_t i = 1; i < rr.reports.size(); ++i) EXPECT_LE(rr.reports[i - 1].id, rr.reports[i].id);
  EXPECT_THROW(verify_all(0, 0, 40, 8), QcfError);
}

TEST(VerifyAll, Deterministic) {
  RunReport x = verify_all(5, 2, 24, 6, {}, 4), y = verify_all(5, 2, 24, 6, {}, 1);
  for (auto* rr : {&x, &y})
    for (auto& r : rr->reports) r.elapsed_ms = 0;
  EXPECT_EQ(x, y);
  EXPECT_EQ(to_json(x).dump(), to_json(y).dump());
}

TEST(VerifyAll, PerturbedRunFails) {
  const RunReport rr = verify_all(0, 1, 30, 8, Perturbation{1, 1});
  EXPECT_GT(rr.summary.fail, 0);
  for (const auto& r : rr.reports) {
    if (r.status == Status::fail) {
      EXPECT_TRUE(r.first_mismatch_power);
    }
  }
}

TEST(VerifyAll, EscalatesMixedOutcomes) {
  // An entry that only fails at the first sampled point.
  const ParamPoint bad = sample_params(0, 1)[0];
  IdentityEntry e = catalog_detail::plain_entry(
      "FAKE", "fails at one point", Kind::series_transformation, [bad](const ParamPoint& p, int N, int) {
        QSeries rhs = QSeries::one(N);
        if (p == bad) rhs[2] = 1;
        return std::vector<Comparison>{{"lhs vs rhs", QSeries::one(N), rhs, N}};
      });
  const RunReport rr = verify_all({e}, 0, 3, 10, 4);
  ASSERT_EQ(rr.reports.size(), 8u);
  EXPECT_EQ(rr.summary.fail, 1);
  EXPECT_EQ(rr.summary.pass, 7);
  EXPECT_EQ(rr.reports[0].status, Status::fail);
  EXPECT_EQ(rr.reports[0].first_mismatch_power, 2);
  EXPECT_NE(rr.reports[0].note.find("suspected accidental cancellation"), std::string::npos);
  for (std::size_t i = 3; i < 8; ++i) EXPECT_EQ(rr.reports[i].note, "escalation point");
  // fresh points continue the same stream
  const auto stream = sample_params(0, 8);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(*rr.reports[i].params, stream[i]);

  IdentityEntry always = e;
  always.extra = [](const ParamPoint&, int N, int) {
    return std::vector<Comparison>{{"x", QSeries::one(N), QSeries::zero(N), N}};
  };
  EXPECT_EQ(verify_all({always}, 0, 3, 10, 4).reports.size(), 3u);
}

TEST(Json, RoundTrip) {
  RunReport rr = verify_all(1, 1, 20, 4, Perturbation{2, 1});
  const RunReport back = run_report_from_json(nlohmann::json::parse(to_json(rr, true).dump()));
  EXPECT_EQ(back, rr);
  const auto j = to_json(rr);
  EXPECT_TRUE(j.contains("run"));
  EXPECT_EQ(j["summary"]["fail"], rr.summary.fail);
  EXPECT_FALSE(j["reports"][0].contains("elapsed_ms"));
}

TEST(Tsv, DumpsFailures) {
  const RunReport rr = verify_all(1, 1, 20, 4, Perturbation{2, 1});
  const std::string tsv = to_tsv(rr);
  EXPECT_EQ(tsv.rfind("id\tparams\torder\tdepth\tstatus\tfirst_mismatch_power\tcomparison\n", 0), 0u);
  EXPECT_NE(tsv.find("power\tlhs\trhs\n"), std::string::npos);
}
