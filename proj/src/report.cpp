#include "sparsedom/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sparsedom {

SlopeFit slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("slope_fit: size mismatch");
  const int n = int(xs.size());
  if (n < 3) throw std::invalid_argument("slope_fit: needs at least 3 points");
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("slope_fit: points must be strictly positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("slope_fit: x values must not coincide");
  SlopeFit out;
  out.slope = sxy / sxx;
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - my - out.slope * (lx[i] - mx);
    rss += e * e;
  }
  out.std_err = std::sqrt(rss / (n - 2) / sxx);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  out.push_back('"');
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

}  // namespace

ParamJson& ParamJson::add(const std::string& key, double value) {
  if (!body_.empty()) body_ += ",";
  body_ += "\"" + json_escape(key) + "\":" + format_double(value);
  return *this;
}

ParamJson& ParamJson::add(const std::string& key, const std::string& value) {
  if (!body_.empty()) body_ += ",";
  body_ += "\"" + json_escape(key) + "\":\"" + json_escape(value) + "\"";
  return *this;
}

ParamJson& ParamJson::add(const std::string& key, int value) {
  if (!body_.empty()) body_ += ",";
  body_ += "\"" + json_escape(key) + "\":" + std::to_string(value);
  return *this;
}

void write_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::string out = "experiment,param_json,lhs,rhs,ratio,slope,stderr,pass\n";
  for (const ReportRow& r : rows) {
    out += r.experiment + "," + csv_quote(r.param_json) + "," + format_double(r.lhs) + "," +
           format_double(r.rhs) + "," + format_double(r.ratio) + "," + format_double(r.slope) +
           "," + format_double(r.std_err) + "," + (r.pass ? "true" : "false") + "\n";
  }
  atomic_write(path, out);
}

void write_summary(const std::string& path, const std::string& experiment,
                   const std::vector<ReportRow>& rows) {
  int failed = 0;
  for (const ReportRow& r : rows) failed += r.pass ? 0 : 1;
  std::string out = "{\n  \"experiment\": \"" + json_escape(experiment) + "\",\n";
  out += "  \"rows\": " + std::to_string(rows.size()) + ",\n";
  out += "  \"failed\": " + std::to_string(failed) + ",\n";
  out += std::string("  \"pass\": ") + (failed == 0 ? "true" : "false") + "\n}\n";
  atomic_write(path, out);
}

void write_svg(const std::string& path, const std::string& title,
               const std::vector<PlotSeries>& series) {
  const int W = 640, H = 480, ML = 60, MR = 20, MT = 40, MB = 40;
  double lx0 = 0, lx1 = 1, ly0 = 0, ly1 = 1;
  bool first = true;
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!(s.xs[i] > 0.0) || !(s.ys[i] > 0.0)) continue;
      const double lx = std::log10(s.xs[i]), ly = std::log10(s.ys[i]);
      if (first) {
        lx0 = lx1 = lx;
        ly0 = ly1 = ly;
        first = false;
      } else {
        lx0 = std::min(lx0, lx);
        lx1 = std::max(lx1, lx);
        ly0 = std::min(ly0, ly);
        ly1 = std::max(ly1, ly);
      }
    }
  if (lx1 - lx0 < 1e-12) lx1 = lx0 + 1;
  if (ly1 - ly0 < 1e-12) ly1 = ly0 + 1;
  auto px = [&](double lx) { return ML + (lx - lx0) / (lx1 - lx0) * (W - ML - MR); };
  auto py = [&](double ly) { return H - MB - (ly - ly0) / (ly1 - ly0) * (H - MT - MB); };

  static const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8540", "#8251a1", "#b2791f", "#3b3b3b"};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
         "\" height=\"" + std::to_string(H) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(W / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";
  out += "<rect x=\"" + std::to_string(ML) + "\" y=\"" + std::to_string(MT) + "\" width=\"" +
         std::to_string(W - ML - MR) + "\" height=\"" + std::to_string(H - MT - MB) +
         "\" fill=\"none\" stroke=\"#999\"/>\n";
  out += "<text x=\"" + std::to_string(W / 2) + "\" y=\"" + std::to_string(H - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 x</text>\n";
  out += "<text x=\"16\" y=\"" + std::to_string(H / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate("
         "-90 16 " + std::to_string(H / 2) + ")\">log10 y</text>\n";
  int ci = 0;
  for (const PlotSeries& s : series) {
    const char* col = colors[ci % 6];
    std::string pts;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!(s.xs[i] > 0.0) || !(s.ys[i] > 0.0)) continue;
      pts += format_double(px(std::log10(s.xs[i]))) + "," +
             format_double(py(std::log10(s.ys[i]))) + " ";
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + std::string(col) +
           "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + std::to_string(W - MR - 4) + "\" y=\"" +
           std::to_string(MT + 16 + 16 * ci) + "\" text-anchor=\"end\" "
           "font-family=\"sans-serif\" font-size=\"11\" fill=\"" + std::string(col) + "\">" +
           s.label + "</text>\n";
    ++ci;
  }
  out += "</svg>\n";
  atomic_write(path, out);
}

}  // namespace sparsedom
