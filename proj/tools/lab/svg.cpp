#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "io.hpp"

namespace lab {

namespace {

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double t(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (t(v) - lo) / (hi - lo); }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int a = static_cast<int>(std::ceil(lo - 1e-9));
      const int b = static_cast<int>(std::floor(hi + 1e-9));
      const int step = std::max(1, (b - a) / 8 + 1);
      for (int k = a; k <= b; k += step) out.push_back(std::pow(10.0, k));
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 6;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
      out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    }
    return out;
  }
};

Axis make_axis(std::vector<double> values, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v) || (log && !(v > 0))) continue;
    const double tv = log ? std::log10(v) : v;
    lo = std::min(lo, tv);
    hi = std::max(hi, tv);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = log ? 0.0 : 0.04 * (hi - lo);
  a.lo = lo - pad;
  a.hi = hi + pad;
  return a;
}

}  // namespace

std::string Plot::svg(int width, int height) const {
  const double L = 70, R = 170, T = 36, B = 52;
  const double pw = width - L - R;
  const double ph = height - T - B;
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      ys.push_back(s.y[i] - e);
      ys.push_back(s.y[i] + e);
    }
    if (s.style == Series::Style::bars && !logy) ys.push_back(0.0);
  }
  for (const auto& h : hlines) ys.push_back(h.y);
  const Axis ax = make_axis(xs, logx);
  const Axis ay = make_axis(ys, logy);
  auto X = [&](double v) { return L + ax.frac(v) * pw; };
  auto Y = [&](double v) { return T + (1 - ay.frac(v)) * ph; };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!logx || x > 0) && (!logy || y > 0);
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << L + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double x = X(t);
    o << "<line x1=\"" << x << "\" y1=\"" << T + ph << "\" x2=\"" << x << "\" y2=\"" << T + ph + 5
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << x << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
      << (logx ? "1e" + num(std::log10(t)) : num(t)) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = Y(t);
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y << "\" stroke=\"black\"/>";
    o << "<text x=\"" << L - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
      << (logy ? "1e" + num(std::log10(t)) : num(t)) << "</text>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << esc(xlabel)
    << "</text>\n";
  o << "<text transform=\"translate(16," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ylabel)
    << "</text>\n";
  o << "<g clip-path=\"none\">\n";
  for (const auto& h : hlines) {
    if (logy && !(h.y > 0)) continue;
    o << "<line x1=\"" << L << "\" y1=\"" << Y(h.y) << "\" x2=\"" << L + pw << "\" y2=\"" << Y(h.y)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>";
    o << "<text x=\"" << L + pw - 4 << "\" y=\"" << Y(h.y) - 4 << "\" text-anchor=\"end\" fill=\"gray\">"
      << esc(h.label) << "</text>\n";
  }
  int legend = 0;
  for (const auto& s : series) {
    const std::string stroke = "stroke=\"" + s.colour + "\" stroke-opacity=\"" + num(s.opacity) + "\"";
    if (s.style == Series::Style::line) {
      o << "<polyline fill=\"none\" " << stroke << " stroke-width=\"" << s.width << "\""
        << (s.dashed ? " stroke-dasharray=\"5 3\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (ok(s.x[i], s.y[i])) o << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
      }
      o << "\"/>\n";
    } else if (s.style == Series::Style::points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ok(s.x[i], s.y[i])) continue;
        if (i < s.err.size() && s.err[i] > 0) {
          const double lo = s.y[i] - s.err[i];
          const double hi = s.y[i] + s.err[i];
          if (!logy || lo > 0) {
            o << "<line x1=\"" << X(s.x[i]) << "\" y1=\"" << Y(lo) << "\" x2=\"" << X(s.x[i]) << "\" y2=\"" << Y(hi)
              << "\" " << stroke << "/>";
          }
        }
        o << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i]) << "\" r=\"3\" fill=\"" << s.colour
          << "\" fill-opacity=\"" << num(s.opacity) << "\"/>\n";
      }
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ok(s.x[i], s.y[i])) continue;
        const std::size_t j = i + 1 < s.x.size() ? i + 1 : (i > 0 ? i - 1 : i);
        double x0 = X(s.x[i]) - 2;
        double x1 = X(s.x[i]) + 2;
        if (j != i) {
          const double half = 0.5 * std::abs(X(s.x[j]) - X(s.x[i]));
          x0 = X(s.x[i]) - half;
          x1 = X(s.x[i]) + half;
        }
        const double y0 = logy ? Y(std::pow(10.0, ay.lo)) : Y(0.0);
        const double y1 = Y(s.y[i]);
        o << "<rect x=\"" << std::min(x0, x1) << "\" y=\"" << std::min(y0, y1) << "\" width=\""
          << std::max(std::abs(x1 - x0), 1.0) << "\" height=\"" << std::abs(y0 - y1) << "\" fill=\"" << s.colour
          << "\" fill-opacity=\"" << num(s.opacity) << "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      const double ly = T + 12 + 16 * legend++;
      o << "<line x1=\"" << L + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + pw + 32 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << s.colour << "\" stroke-width=\"3\"" << (s.dashed ? " stroke-dasharray=\"5 3\"" : "")
        << "/>";
      o << "<text x=\"" << L + pw + 38 << "\" y=\"" << ly << "\">" << esc(s.label) << "</text>\n";
    }
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace lab
