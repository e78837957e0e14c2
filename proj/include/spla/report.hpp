#ifndef SPLA_REPORT_HPP
#define SPLA_REPORT_HPP

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "spla/pipeline.hpp"

namespace spla {

using json = nlohmann::ordered_json;

namespace detail {

inline json block_json(const Block& b, const std::vector<std::string>& names) {
  json vars = json::array();
  for (Index v : b.variables) vars.push_back(names[v]);
  return {{"label", block_label(b, names)}, {"variables", vars}, {"indices", b.variables}, {"loadings", b.loadings}};
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  // Width counts code points so labels like {I/Y} or "–" line up.
  std::size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  if (cps < width) s.append(width - cps, ' ');
  return s;
}

}  // namespace detail

/// The report as a schema-stable JSON value. Top-level keys are fixed.
inline json report_json(const SplaReport& r) {
  const auto& names = r.names;
  json out;

  json partition = json::array();
  for (const auto& b : r.partition.blocks) partition.push_back(detail::block_json(b, names));
  out["partition"] = partition;

  json ordering = json::array();
  for (const auto& b : r.partition.blocks) ordering.push_back(block_label(b, names));
  out["ordering"] = ordering;

  json entries = json::array();
  for (Index b = 0; b < r.partition.size(); ++b) {
    const BlockEc& e = r.evaluation.entries[b];
    entries.push_back({{"block", block_label(r.partition[b], names)},
                       {"ec", detail::optional_number(e.ec)},
                       {"delta_star", e.delta_star}});
  }
  out["ec"] = {{"c_ec", r.c_ec}, {"min_ec", r.evaluation.min_ec}, {"pass", r.evaluation.pass}, {"entries", entries}};

  json loading_sv = json::array();
  for (Index k = 0; k < r.shares.loading_sv.size(); ++k)
    loading_sv.push_back({{"loading", r.corrected.loading_order[k]}, {"sv", r.shares.loading_sv[k]}});
  json blocks = json::array();
  for (Index b = 0; b < r.partition.size(); ++b)
    blocks.push_back({{"block", block_label(r.partition[b], names)},
                      {"sv", r.shares.block_sv[b]},
                      {"cv", r.shares.block_cv[b]}});
  out["shares"] = {{"loadings", loading_sv}, {"blocks", blocks}};

  json partial = json::array();
  for (Index b = 0; b < r.partition.size(); ++b)
    partial.push_back({{"block", block_label(r.partition[b], names)}, {"share", r.partial_shares[b]}});
  out["partial_shares"] = partial;

  json recs = json::array();
  for (const auto& rec : r.recommendations)
    recs.push_back({{"block", block_label(r.partition[rec.block], names)},
                    {"sv", rec.sv},
                    {"flag_threshold", rec.flag_threshold},
                    {"flagged", rec.flagged},
                    {"partial_share", detail::optional_number(rec.partial_share)},
                    {"verify_threshold", rec.verify_threshold},
                    {"verified", rec.verified},
                    {"discard", rec.discard()}});
  out["recommendations"] = recs;

  json points = json::array();
  for (Index k = 0; k < r.trace.size(); ++k) {
    const GridPoint& gp = r.trace[k];
    json pt{{"penalty", gp.penalty}};
    if (gp.partition) {
      json labels = json::array();
      for (const auto& b : gp.partition->blocks) labels.push_back(block_label(b, names));
      pt["blocks"] = gp.partition->size();
      pt["partition"] = labels;
      pt["min_ec"] = gp.min_ec;
      pt["pass"] = gp.pass;
    } else {
      pt["blocks"] = nullptr;
      pt["partition"] = nullptr;
      pt["min_ec"] = nullptr;
      pt["pass"] = false;
      pt["error"] = gp.error;
    }
    points.push_back(pt);
  }
  out["penalty_trace"] = {{"method", std::string(to_string(r.method))},
                          {"standardized", r.standardized},
                          {"chosen", r.chosen ? json(*r.chosen) : json(nullptr)},
                          {"points", points}};
  return out;
}

/// Human-readable rendering of report_json output. Percentages use two decimals.
inline std::string render_table(const json& j) {
  std::ostringstream os;
  const auto& trace = j.at("penalty_trace");
  os << "method " << trace.at("method").get<std::string>()
     << (trace.at("standardized").get<bool>() ? " (standardized)" : "") << "\n";
  os << "chosen grid point: ";
  if (trace.at("chosen").is_null())
    os << "none (single block)\n";
  else
    os << trace.at("chosen").get<Index>() + 1 << " of " << trace.at("points").size() << "\n";

  os << "\nblocks in evaluation order\n";
  os << detail::pad("block", 24) << detail::pad("EC", 10) << detail::pad("SV", 10) << detail::pad("CV", 10)
     << detail::pad("partial", 10) << "\n";
  const auto& ec = j.at("ec").at("entries");
  const auto& blocks = j.at("shares").at("blocks");
  const auto& partial = j.at("partial_shares");
  for (std::size_t b = 0; b < ec.size(); ++b) {
    const auto& e = ec[b].at("ec");
    os << detail::pad(ec[b].at("block").get<std::string>(), 24)
       << detail::pad(e.is_null() ? "-" : detail::fixed(e.get<double>(), 4), 10)
       << detail::pad(detail::fixed(blocks[b].at("sv").get<double>(), 2), 10)
       << detail::pad(detail::fixed(blocks[b].at("cv").get<double>(), 2), 10)
       << detail::pad(detail::fixed(partial[b].at("share").get<double>(), 2), 10) << "\n";
  }
  os << "min EC " << detail::fixed(j.at("ec").at("min_ec").get<double>(), 4) << " against c_ec "
     << detail::fixed(j.at("ec").at("c_ec").get<double>(), 2) << ": "
     << (j.at("ec").at("pass").get<bool>() ? "pass" : "fail") << "\n";

  os << "\nrecommendations\n";
  bool any = false;
  for (const auto& r : j.at("recommendations")) {
    if (!r.at("flagged").get<bool>()) continue;
    any = true;
    os << r.at("block").get<std::string>() << ": SV " << detail::fixed(r.at("sv").get<double>(), 2) << " < "
       << detail::fixed(r.at("flag_threshold").get<double>(), 2) << ", partial share "
       << detail::fixed(r.at("partial_share").get<double>(), 2)
       << (r.at("verified").get<bool>() ? " < " : " >= ")
       << detail::fixed(r.at("verify_threshold").get<double>(), 2) << " -> "
       << (r.at("discard").get<bool>() ? "discard" : "keep") << "\n";
  }
  if (!any) os << "no block flagged\n";

  os << "\npenalty trace\n";
  for (const auto& p : trace.at("points")) {
    os << detail::pad(detail::fixed(p.at("penalty").get<double>(), 4), 10);
    if (p.at("partition").is_null()) {
      os << "error: " << p.at("error").get<std::string>() << "\n";
      continue;
    }
    os << detail::pad(std::to_string(p.at("blocks").get<Index>()) + " blocks", 11)
       << detail::pad("min EC " + detail::fixed(p.at("min_ec").get<double>(), 4), 16)
       << detail::pad(p.at("pass").get<bool>() ? "pass" : "fail", 6);
    std::string labels;
    for (const auto& l : p.at("partition")) labels += l.get<std::string>();
    os << labels << "\n";
  }
  return os.str();
}

}  // namespace spla

#endif  // SPLA_REPORT_HPP
