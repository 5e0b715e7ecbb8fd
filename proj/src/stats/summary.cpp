#include "rstdiag/stats/summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "rstdiag/core/csv.hpp"
#include "rstdiag/core/validate.hpp"

namespace rstdiag::stats {

using core::Criterion;
using core::Difficulty;
using core::EvaluationRecord;
using nlohmann::json;
namespace fs = std::filesystem;

double Ratio::value() const { return defined() ? static_cast<double>(num) / static_cast<double>(den) : std::nan(""); }

std::string Ratio::fixed(int places) const {
  if (!defined()) return "NA";
  // Exact half-up on the rational, not on the nearest double.
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const bool negative = (num < 0) != (den < 0);
  const std::int64_t n = num < 0 ? -num : num, d = den < 0 ? -den : den;
  const std::int64_t scaled = (2 * n * scale + d) / (2 * d);
  std::string digits = std::to_string(scaled / scale);
  if (places > 0) {
    std::string frac = std::to_string(scaled % scale);
    digits += "." + std::string(places - frac.size(), '0') + frac;
  }
  return (negative && scaled != 0 ? "-" : "") + digits;
}

namespace {

void tally(Ratio& r, bool counted_in_numerator) {
  ++r.den;
  r.num += counted_in_numerator;
}

void tally_optional(Ratio& r, const std::optional<bool>& present) {
  if (present) tally(r, !*present);
}

bool high_quality(const EvaluationRecord& r) { return r.scores.c1 > 3 && r.scores.c2 > 3 && r.scores.c3 > 3; }

std::vector<const core::RubricAnnotation*> sorted_annotations(const EvaluationRecord& r) {
  std::vector<const core::RubricAnnotation*> out;
  for (const auto& a : r.annotations) out.push_back(&a);
  std::stable_sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->rater_id < b->rater_id; });
  return out;
}

CriterionTable criterion_table(const std::vector<const EvaluationRecord*>& records, Criterion c) {
  CriterionTable t;
  t.criterion = c;
  std::vector<int> scores;
  for (auto d : core::kAllDifficulties) t.good_by_difficulty[d] = {};
  for (const auto* r : records) {
    const int s = r->scores.at(c);
    scores.push_back(s);
    ++t.counts[static_cast<std::size_t>(s - 1)];
    tally(t.good_by_difficulty[r->difficulty], s > 3);
  }
  t.n = static_cast<std::int64_t>(records.size());
  for (std::size_t i = 0; i < 5; ++i) t.distribution[i] = {t.counts[i], t.n};
  const auto top = *std::max_element(t.counts.begin(), t.counts.end());
  if (top > 0)
    for (std::size_t i = 0; i < 5; ++i)
      if (t.counts[i] == top) t.modes.push_back(static_cast<int>(i) + 1);
  if (!scores.empty()) t.quartiles = quartiles(scores);
  return t;
}

}  // namespace

ReliabilityEstimate reliability_for(const std::vector<const EvaluationRecord*>& records, Criterion c,
                                    const AlphaOptions& options) {
  ReliabilityEstimate est;
  est.criterion = c;
  std::set<std::string> rater_set;
  for (const auto* r : records)
    for (const auto& a : r->annotations) rater_set.insert(a.rater_id);
  const std::vector<std::string> raters(rater_set.begin(), rater_set.end());
  est.n_raters = static_cast<int>(raters.size());

  std::vector<const EvaluationRecord*> rated;
  for (const auto* r : records)
    if (r->annotations.size() >= 2) rated.push_back(r);
  est.n_units = static_cast<int>(rated.size());

  RatingsMatrix sparse(static_cast<int>(records.size()), static_cast<int>(raters.size()));
  for (std::size_t u = 0; u < records.size(); ++u) {
    for (const auto& a : records[u]->annotations) {
      const auto col = std::lower_bound(raters.begin(), raters.end(), a.rater_id) - raters.begin();
      sparse.set(static_cast<int>(u), static_cast<int>(col), a.score(c));
    }
  }
  try {
    est.alpha = krippendorff_alpha_ordinal(sparse, options);
  } catch (const StatsError& e) {
    est.alpha_error = e.what();
  }

  RatingsMatrix paired(static_cast<int>(rated.size()), 2);
  for (std::size_t u = 0; u < rated.size(); ++u) {
    const auto anns = sorted_annotations(*rated[u]);
    paired.set(static_cast<int>(u), 0, anns[0]->score(c));
    paired.set(static_cast<int>(u), 1, anns[1]->score(c));
  }
  try {
    est.w = kendall_w(paired);
  } catch (const StatsError& e) {
    est.w_error = e.what();
  }
  return est;
}

SummaryTables summarize_dataset(const core::EvaluationDataset& dataset, const SummaryOptions& options) {
  core::require_valid(dataset, options.require_complete);

  std::map<std::string, std::map<core::Method, std::vector<const EvaluationRecord*>>> groups;
  for (const auto& r : dataset.records) groups[r.model][r.method].push_back(&r);

  SummaryTables out;
  for (const auto& [model, by_method] : groups) {
    for (auto method : core::kAllMethods) {
      auto it = by_method.find(method);
      if (it == by_method.end()) continue;
      const auto& recs = it->second;
      CellSummary cell;
      cell.model = model;
      cell.method = method;
      cell.n = static_cast<std::int64_t>(recs.size());
      for (std::size_t k = 0; k < 3; ++k) {
        cell.criteria[k] = criterion_table(recs, core::kAllCriteria[k]);
        if (options.compute_irr) cell.criteria[k].irr = reliability_for(recs, core::kAllCriteria[k], options.alpha);
      }
      for (const auto* r : recs) {
        const auto tags = r->effective_hallucination();
        tally(cell.hallucination.h_fact, !tags.h_fact);
        tally(cell.hallucination.h_ae, !tags.h_ae);
        tally(cell.hallucination.h_c, !tags.h_c);
        tally(cell.hallucination.h_log, !tags.h_log);
        tally(cell.hallucination.g_r, high_quality(*r) && !tags.any());
        if (r->step_hallucination) {
          const auto& s = *r->step_hallucination;
          tally_optional(cell.steps.h1, s.h1);
          tally_optional(cell.steps.h2, s.h2);
          tally_optional(cell.steps.h6, s.h6);
          tally_optional(cell.steps.h_inh, s.h_inh);
          if (high_quality(*r)) {
            tally_optional(cell.steps.g6, s.h6);
            tally_optional(cell.steps.g_inh, s.h_inh);
          }
        }
      }
      out.cells.push_back(std::move(cell));
    }
  }

  if (options.compute_irr) {
    std::vector<const EvaluationRecord*> all;
    for (const auto& r : dataset.records) all.push_back(&r);
    for (auto c : core::kAllCriteria) out.overall_irr.push_back(reliability_for(all, c, options.alpha));
  }

  auto& fig = out.figures;
  for (auto d : core::kAllDifficulties) {
    fig.faith_count_by_difficulty[d] = {};
    for (const char* key : {"H1", "H2", "H6", "H_inh", "H_fact"}) fig.free_by_difficulty[d][key] = {};
  }
  for (const auto& r : dataset.records) {
    const auto tags = r.effective_hallucination();
    const std::array<bool, 3> faith = {tags.h_ae, tags.h_c, tags.h_log};
    for (std::size_t k = 0; k < 3; ++k) {
      const int s = r.scores.at(core::kAllCriteria[k]);
      for (std::size_t t = 0; t < 3; ++t) fig.faith_by_score[k][static_cast<std::size_t>(s - 1)][t] += faith[t];
    }
    ++fig.faith_count_by_difficulty[r.difficulty][static_cast<std::size_t>(tags.faithfulness_count())];
    auto& free = fig.free_by_difficulty[r.difficulty];
    tally(free["H_fact"], !tags.h_fact);
    if (r.step_hallucination) {
      tally_optional(free["H1"], r.step_hallucination->h1);
      tally_optional(free["H2"], r.step_hallucination->h2);
      tally_optional(free["H6"], r.step_hallucination->h6);
      tally_optional(free["H_inh"], r.step_hallucination->h_inh);
    }
  }
  return out;
}

json to_json(const Ratio& r) {
  return {{"num", r.num}, {"den", r.den}, {"value", r.defined() ? json(r.value()) : json(nullptr)}};
}

namespace {

json number(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 1e15) return static_cast<std::int64_t>(x);
  return x;
}

std::string fmt(double x, int places = 6) {
  if (!std::isfinite(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, x);
  return buf;
}

const char* tier_key(Difficulty d) {
  switch (d) {
    case Difficulty::advanced: return "G_a";
    case Difficulty::medium: return "G_m";
    case Difficulty::basic: return "G_b";
  }
  return "?";
}

}  // namespace

json to_json(const ReliabilityEstimate& r) {
  json j = {{"criterion", core::to_string(r.criterion)}, {"n_units", r.n_units}, {"n_raters", r.n_raters}};
  if (r.alpha) {
    j["alpha"] = {{"estimate", r.alpha->alpha},
                  {"ci_low", r.alpha->ci_low},
                  {"ci_high", r.alpha->ci_high},
                  {"ci_widened", r.alpha->ci_widened},
                  {"degenerate", r.alpha->degenerate},
                  {"pairable_units", r.alpha->n_units},
                  {"bootstrap_samples", r.alpha->bootstrap_samples},
                  {"seed", r.alpha->seed}};
  } else {
    j["alpha"] = nullptr;
    j["alpha_error"] = r.alpha_error;
  }
  if (r.w) {
    j["kendall_w"] = {{"w", r.w->w}, {"chi_square", r.w->chi_square}, {"df", r.w->df}, {"p_value", r.w->p_value}};
  } else {
    j["kendall_w"] = nullptr;
    j["kendall_w_error"] = r.w_error;
  }
  return j;
}

json to_json(const SummaryTables& t) {
  json cells = json::array();
  for (const auto& c : t.cells) {
    json crit = json::object();
    for (const auto& ct : c.criteria) {
      json dist = json::object(), counts = json::object(), good = json::object();
      for (std::size_t i = 0; i < 5; ++i) {
        dist[std::to_string(i + 1)] = to_json(ct.distribution[i]);
        counts[std::to_string(i + 1)] = ct.counts[i];
      }
      for (const auto& [d, r] : ct.good_by_difficulty) good[tier_key(d)] = to_json(r);
      json q = ct.n > 0 ? json::array({number(ct.quartiles.q1), number(ct.quartiles.q2), number(ct.quartiles.q3)})
                        : json(nullptr);
      json entry = {{"n", ct.n}, {"counts", counts}, {"distribution", dist}, {"modes", ct.modes},
                    {"quartiles", q}, {"good_by_difficulty", good}};
      if (ct.irr) entry["irr"] = to_json(*ct.irr);
      crit[std::string(core::to_string(ct.criterion))] = std::move(entry);
    }
    cells.push_back({{"model", c.model},
                     {"method", core::to_string(c.method)},
                     {"n", c.n},
                     {"criteria", crit},
                     {"hallucination_free",
                      {{"H_fact", to_json(c.hallucination.h_fact)},
                       {"H_ae", to_json(c.hallucination.h_ae)},
                       {"H_c", to_json(c.hallucination.h_c)},
                       {"H_log", to_json(c.hallucination.h_log)},
                       {"G_r", to_json(c.hallucination.g_r)}}},
                     {"steps",
                      {{"H1", to_json(c.steps.h1)},
                       {"H2", to_json(c.steps.h2)},
                       {"H6", to_json(c.steps.h6)},
                       {"G6", to_json(c.steps.g6)},
                       {"H_inh", to_json(c.steps.h_inh)},
                       {"G_inh", to_json(c.steps.g_inh)}}}});
  }
  json by_score = json::object();
  for (std::size_t k = 0; k < 3; ++k) {
    json per = json::object();
    for (std::size_t s = 0; s < 5; ++s) {
      const auto& v = t.figures.faith_by_score[k][s];
      per[std::to_string(s + 1)] = {{"H_ae", v[0]}, {"H_c", v[1]}, {"H_log", v[2]}};
    }
    by_score[std::string(core::to_string(core::kAllCriteria[k]))] = per;
  }
  json count_by_diff = json::object(), free_by_diff = json::object();
  for (const auto& [d, v] : t.figures.faith_count_by_difficulty)
    count_by_diff[std::string(core::to_string(d))] = v;
  for (const auto& [d, m] : t.figures.free_by_difficulty) {
    json e = json::object();
    for (const auto& [k, r] : m) e[k] = to_json(r);
    free_by_diff[std::string(core::to_string(d))] = e;
  }
  json overall = json::array();
  for (const auto& r : t.overall_irr) overall.push_back(to_json(r));
  return {{"quartile_method", t.quartile_method},
          {"cells", cells},
          {"overall_irr", overall},
          {"figures",
           {{"faith_by_score", by_score},
            {"faith_count_by_difficulty", count_by_diff},
            {"free_by_difficulty", free_by_diff}}}};
}

std::vector<fs::path> write_summary_csvs(const SummaryTables& t, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto open = [&](const char* name) {
    written.push_back(dir / name);
    std::ofstream f(written.back(), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + written.back().string());
    return f;
  };
  using core::write_csv_row;
  {
    auto f = open("scores.csv");
    write_csv_row(f, {"model", "method", "criterion", "n", "p1", "p2", "p3", "p4", "p5", "modes", "q1", "q2", "q3",
                      "G_a", "G_m", "G_b", "alpha", "alpha_ci_low", "alpha_ci_high", "kendall_w", "kendall_p"});
    for (const auto& c : t.cells) {
      for (const auto& ct : c.criteria) {
        std::vector<std::string> row = {c.model, std::string(core::to_string(c.method)),
                                        std::string(core::to_string(ct.criterion)), std::to_string(ct.n)};
        for (const auto& r : ct.distribution) row.push_back(r.fixed(4));
        std::string modes;
        for (int m : ct.modes) modes += (modes.empty() ? "" : ";") + std::to_string(m);
        row.push_back(modes);
        row.push_back(fmt(ct.quartiles.q1, 2));
        row.push_back(fmt(ct.quartiles.q2, 2));
        row.push_back(fmt(ct.quartiles.q3, 2));
        for (auto d : {Difficulty::advanced, Difficulty::medium, Difficulty::basic})
          row.push_back(ct.good_by_difficulty.at(d).fixed(4));
        if (ct.irr && ct.irr->alpha) {
          row.push_back(fmt(ct.irr->alpha->alpha));
          row.push_back(fmt(ct.irr->alpha->ci_low));
          row.push_back(fmt(ct.irr->alpha->ci_high));
        } else {
          row.insert(row.end(), {"NA", "NA", "NA"});
        }
        if (ct.irr && ct.irr->w) {
          row.push_back(fmt(ct.irr->w->w));
          row.push_back(fmt(ct.irr->w->p_value, 8));
        } else {
          row.insert(row.end(), {"NA", "NA"});
        }
        write_csv_row(f, row);
      }
    }
  }
  {
    auto f = open("hallucination.csv");
    write_csv_row(f, {"model", "method", "n", "H_fact", "H_ae", "H_c", "H_log", "G_r"});
    for (const auto& c : t.cells) {
      const auto& h = c.hallucination;
      write_csv_row(f, {c.model, std::string(core::to_string(c.method)), std::to_string(c.n), h.h_fact.fixed(4),
                        h.h_ae.fixed(4), h.h_c.fixed(4), h.h_log.fixed(4), h.g_r.fixed(4)});
    }
  }
  {
    auto f = open("steps.csv");
    write_csv_row(f, {"model", "method", "H1", "H2", "H6", "G6", "H_inh", "G_inh"});
    for (const auto& c : t.cells) {
      const auto& s = c.steps;
      write_csv_row(f, {c.model, std::string(core::to_string(c.method)), s.h1.fixed(4), s.h2.fixed(4),
                        s.h6.fixed(4), s.g6.fixed(4), s.h_inh.fixed(4), s.g_inh.fixed(4)});
    }
  }
  {
    auto f = open("fig_faith_by_score.csv");
    write_csv_row(f, {"criterion", "score", "H_ae", "H_c", "H_log"});
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t s = 0; s < 5; ++s) {
        const auto& v = t.figures.faith_by_score[k][s];
        write_csv_row(f, {std::string(core::to_string(core::kAllCriteria[k])), std::to_string(s + 1),
                          std::to_string(v[0]), std::to_string(v[1]), std::to_string(v[2])});
      }
  }
  {
    auto f = open("fig_faith_by_difficulty.csv");
    write_csv_row(f, {"difficulty", "types_0", "types_1", "types_2", "types_3"});
    for (const auto& [d, v] : t.figures.faith_count_by_difficulty)
      write_csv_row(f, {std::string(core::to_string(d)), std::to_string(v[0]), std::to_string(v[1]),
                        std::to_string(v[2]), std::to_string(v[3])});
  }
  {
    auto f = open("fig_free_by_difficulty.csv");
    write_csv_row(f, {"difficulty", "H1", "H2", "H6", "H_inh", "H_fact"});
    for (const auto& [d, m] : t.figures.free_by_difficulty)
      write_csv_row(f, {std::string(core::to_string(d)), m.at("H1").fixed(4), m.at("H2").fixed(4),
                        m.at("H6").fixed(4), m.at("H_inh").fixed(4), m.at("H_fact").fixed(4)});
  }
  return written;
}

}  // namespace rstdiag::stats
