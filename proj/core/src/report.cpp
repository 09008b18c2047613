#include "argmine/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "argmine/errors.hpp"
#include "argmine/logistic.hpp"

namespace argmine {

const char* const kReportColorLow = "#f2a09a";
const char* const kReportColorHigh = "#9ab5f2";

AttributionRow attribute(const RankerModel& model, const RankerDesign& design,
                         std::size_t row, const std::string& sentence_key) {
  if (row >= design.x.rows) throw ConfigError("attribute: row out of range");
  if (design.x.cols != model.weights.size())
    throw ConfigError("attribute: column mismatch");

  AttributionRow out;
  out.sentence_key = sentence_key;
  double presigmoid = model.intercept;
  for (std::size_t i = design.x.row_begin[row];
       i < design.x.row_begin[row + 1]; ++i) {
    const int c = design.x.col[i];
    double v = design.x.val[i];
    auto it = model.standardization.mean_sd.find(c);
    if (it != model.standardization.mean_sd.end()) {
      const auto [mean, sd] = it->second;
      v = sd > 0.0 ? (v - mean) / sd : 0.0;
    }
    const double contribution =
        model.weights[static_cast<std::size_t>(c)] * v;
    if (contribution != 0.0) {
      out.contributions.push_back(
          {model.column_names[static_cast<std::size_t>(c)], contribution});
    }
    presigmoid += contribution;
  }
  std::stable_sort(out.contributions.begin(), out.contributions.end(),
                   [](const Contribution& a, const Contribution& b) {
                     return std::abs(a.value) > std::abs(b.value);
                   });
  out.presigmoid = presigmoid;
  out.score = sigmoid(presigmoid);
  return out;
}

namespace {

std::string escape_html(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

int hex_channel(const char* color, int channel) {
  auto nibble = [](char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return c - 'A' + 10;
  };
  const int off = 1 + channel * 2;
  return nibble(color[off]) * 16 + nibble(color[off + 1]);
}

// Linear RGB interpolation between the fixed endpoints.
std::string shade(double t) {
  std::ostringstream os;
  os << '#' << std::hex << std::setfill('0');
  for (int ch = 0; ch < 3; ++ch) {
    const int lo = hex_channel(kReportColorLow, ch);
    const int hi = hex_channel(kReportColorHigh, ch);
    const int v = static_cast<int>(std::lround(lo + (hi - lo) * t));
    os << std::setw(2) << std::min(255, std::max(0, v));
  }
  return os.str();
}

std::string format_score(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

std::string render_post_html(const Post& post,
                             const std::vector<double>& scores,
                             const std::vector<AttributionRow>& attributions) {
  if (scores.size() != post.sentences.size())
    throw ConfigError("render_post_html: score count mismatch");

  double lo = 0.0, hi = 0.0;
  if (!scores.empty()) {
    lo = *std::min_element(scores.begin(), scores.end());
    hi = *std::max_element(scores.begin(), scores.end());
  }

  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>"
     << escape_html(post.id) << "</title>\n"
     << "<style>\n"
     << "body { font-family: sans-serif; max-width: 56em; margin: 2em auto; }\n"
     << ".sentence { padding: 2px 4px; border-radius: 3px; }\n"
     << ".successful { text-decoration: underline; }\n"
     << ".features { color: #444; font-size: 80%; margin: 0 0 10px 12px; }\n"
     << ".pos { color: #2b4bbf; }\n"
     << ".neg { color: #bf3a2b; }\n"
     << "</style>\n</head>\n<body>\n";
  os << "<h2>" << escape_html(post.title.empty() ? post.id : post.title)
     << "</h2>\n";

  for (std::size_t i = 0; i < post.sentences.size(); ++i) {
    const auto& sentence = post.sentences[i];
    const double t = hi > lo ? (scores[i] - lo) / (hi - lo) : 0.5;
    const bool successful = sentence.success == Success::successful;
    os << "<p><span class=\"sentence" << (successful ? " successful" : "")
       << "\" style=\"background:" << shade(t) << "\">"
       << escape_html(sentence.text) << "</span> <small>("
       << format_score(scores[i]) << ")</small></p>\n";

    if (i < attributions.size()) {
      const auto& attr = attributions[i];
      std::vector<const Contribution*> pos, neg;
      for (const auto& c : attr.contributions) {
        if (c.value > 0 && pos.size() < 3) pos.push_back(&c);
        if (c.value < 0 && neg.size() < 3) neg.push_back(&c);
      }
      if (!pos.empty() || !neg.empty()) {
        os << "<div class=\"features\">";
        bool first = true;
        for (const auto* c : pos) {
          if (!first) os << ", ";
          os << "<span class=\"pos\">" << escape_html(c->feature) << " "
             << format_score(c->value) << "</span>";
          first = false;
        }
        for (const auto* c : neg) {
          if (!first) os << ", ";
          os << "<span class=\"neg\">" << escape_html(c->feature) << " "
             << format_score(c->value) << "</span>";
          first = false;
        }
        os << "</div>\n";
      }
    }
  }
  os << "</body>\n</html>\n";
  return os.str();
}

std::string render_index_html(
    const std::vector<std::pair<std::string, std::string>>& post_pages,
    const std::string& effects_table_html) {
  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
     << "<title>attackability report</title>\n"
     << "<style>\n"
     << "body { font-family: sans-serif; max-width: 56em; margin: 2em auto; }\n"
     << "table.effects { border-collapse: collapse; }\n"
     << "table.effects td, table.effects th "
     << "{ border: 1px solid #ccc; padding: 2px 8px; }\n"
     << ".pos { color: #2b4bbf; }\n"
     << ".neg { color: #bf3a2b; }\n"
     << "</style>\n</head>\n<body>\n"
     << "<h2>Posts</h2>\n<ul>\n";
  for (const auto& [post_id, page] : post_pages) {
    os << "<li><a href=\"" << escape_html(page) << "\">"
       << escape_html(post_id) << "</a></li>\n";
  }
  os << "</ul>\n";
  if (!effects_table_html.empty()) {
    os << "<h2>Feature effects</h2>\n" << effects_table_html;
  }
  os << "</body>\n</html>\n";
  return os.str();
}

}  // namespace argmine
