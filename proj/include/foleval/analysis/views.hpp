#ifndef FOLEVAL_ANALYSIS_VIEWS_HPP
#define FOLEVAL_ANALYSIS_VIEWS_HPP

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "foleval/analysis/tsne.hpp"
#include "foleval/errors.hpp"
#include "foleval/providers.hpp"

namespace foleval::analysis {

// The three texts compared in the embedding-space study: the original
// request, its logical reformulation, and the composed prompt.
struct RequestViews {
  std::string request_id;
  std::string language;
  std::string raw;
  std::string logic;
  std::string full_prompt;
};

inline std::vector<double> mean_pool(const std::vector<TokenVector>& tokens) {
  if (tokens.empty()) {
    throw Error(Errc::embedding_error, "no tokens to pool");
  }
  std::vector<double> out(tokens[0].values.size(), 0.0);
  for (const auto& tv : tokens) {
    if (tv.values.size() != out.size()) {
      throw Error(Errc::embedding_error, "ragged token vectors");
    }
    for (size_t k = 0; k < out.size(); ++k) out[k] += tv.values[k];
  }
  for (double& v : out) v /= static_cast<double>(tokens.size());
  return out;
}

// One mean-pooled point per (request, view); requests missing a view are
// skipped and noted in `warnings` when provided.
inline EmbeddingSet embed_corpus_views(const std::vector<RequestViews>& requests,
                                       EmbeddingProvider& embedder,
                                       std::vector<std::string>* warnings = nullptr) {
  EmbeddingSet set;
  for (const auto& rv : requests) {
    if (rv.raw.empty() || rv.logic.empty() || rv.full_prompt.empty()) {
      if (warnings) {
        warnings->push_back("request " + rv.request_id + " missing a view, skipped");
      }
      continue;
    }
    const std::pair<const char*, const std::string*> views[] = {
        {"raw", &rv.raw}, {"logic", &rv.logic}, {"full_prompt", &rv.full_prompt}};
    for (const auto& [label, text] : views) {
      set.points.push_back(mean_pool(embedder.embed_tokens(*text, rv.language)));
      set.labels.push_back(label);
    }
  }
  return set;
}

namespace detail {

inline std::string fmt_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors;
}

}  // namespace detail

// Writes <path>.csv (x,y,label) and <path>.svg (800x600, one color per label
// in sorted label order, with a legend). Byte-deterministic for fixed inputs.
inline void emit_scatter(const Projection& proj, const std::vector<std::string>& labels,
                         const std::string& path_prefix) {
  if (labels.size() != proj.coords.size()) {
    throw Error(Errc::io_error, "labels and coords differ in length");
  }

  std::ofstream csv(path_prefix + ".csv");
  if (!csv) throw Error(Errc::io_error, "cannot write " + path_prefix + ".csv");
  csv << "x,y,label\n";
  for (size_t i = 0; i < proj.coords.size(); ++i) {
    csv << detail::fmt_coord(proj.coords[i][0]) << ','
        << detail::fmt_coord(proj.coords[i][1]) << ',' << labels[i] << '\n';
  }
  if (!csv.flush()) throw Error(Errc::io_error, "write failed for " + path_prefix + ".csv");

  // color assignment by sorted label order
  std::map<std::string, std::string> color;
  for (const auto& l : labels) color[l];
  size_t idx = 0;
  for (auto& [label, c] : color) {
    c = detail::palette()[idx % detail::palette().size()];
    ++idx;
  }

  double min_x = proj.coords[0][0], max_x = min_x;
  double min_y = proj.coords[0][1], max_y = min_y;
  for (const auto& p : proj.coords) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  double span_x = max_x - min_x > 0 ? max_x - min_x : 1.0;
  double span_y = max_y - min_y > 0 ? max_y - min_y : 1.0;
  const double w = 800, h = 600, margin = 40;
  auto sx = [&](double x) { return margin + (x - min_x) / span_x * (w - 2 * margin); };
  auto sy = [&](double y) { return h - margin - (y - min_y) / span_y * (h - 2 * margin); };

  std::ofstream svg(path_prefix + ".svg");
  if (!svg) throw Error(Errc::io_error, "cannot write " + path_prefix + ".svg");
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
         "width=\"800\" height=\"600\">\n";
  svg << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  for (size_t i = 0; i < proj.coords.size(); ++i) {
    svg << "<circle cx=\"" << detail::fmt_coord(sx(proj.coords[i][0])) << "\" cy=\""
        << detail::fmt_coord(sy(proj.coords[i][1])) << "\" r=\"4\" fill=\""
        << color[labels[i]] << "\" fill-opacity=\"0.8\"/>\n";
  }
  double ly = margin;
  for (const auto& [label, c] : color) {
    svg << "<rect x=\"" << detail::fmt_coord(w - margin - 150) << "\" y=\""
        << detail::fmt_coord(ly) << "\" width=\"12\" height=\"12\" fill=\"" << c
        << "\"/>\n";
    svg << "<text x=\"" << detail::fmt_coord(w - margin - 132) << "\" y=\""
        << detail::fmt_coord(ly + 11) << "\" font-family=\"sans-serif\" "
           "font-size=\"14\">"
        << label << "</text>\n";
    ly += 20;
  }
  svg << "</svg>\n";
  if (!svg.flush()) throw Error(Errc::io_error, "write failed for " + path_prefix + ".svg");
}

}  // namespace foleval::analysis

#endif  // FOLEVAL_ANALYSIS_VIEWS_HPP
