#pragma once

#include <string>
#include <vector>

namespace sparsedom {

struct ReportRow {
  std::string experiment;
  std::string param_json;
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
  double slope = 0;
  double std_err = 0;
  bool pass = false;
};

struct SlopeFit {
  double slope = 0;
  double std_err = 0;
};

// least squares of log y against log x; needs >= 3 strictly positive points
SlopeFit slope_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// incremental builder for flat one-line JSON objects with stable key order
class ParamJson {
 public:
  ParamJson& add(const std::string& key, double value);
  ParamJson& add(const std::string& key, const std::string& value);
  ParamJson& add(const std::string& key, int value);
  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
};

std::string format_double(double v);  // %.12g

// header: experiment,param_json,lhs,rhs,ratio,slope,stderr,pass
void write_csv(const std::string& path, const std::vector<ReportRow>& rows);
void write_summary(const std::string& path, const std::string& experiment,
                   const std::vector<ReportRow>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

// minimal log-log polyline chart
void write_svg(const std::string& path, const std::string& title,
               const std::vector<PlotSeries>& series);

}  // namespace sparsedom
