#include "cli_output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

namespace tpcli {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto " + path);
  }
}

std::vector<tp_sample> samples_of(const tp_trajectory* tr) {
  std::vector<tp_sample> s(tp_trajectory_size(tr));
  for (std::size_t i = 0; i < s.size(); ++i) tp_trajectory_sample(tr, i, &s[i]);
  return s;
}

std::string trajectory_csv(const std::vector<tp_sample>& s, bool master) {
  std::string out = std::string(kTrajectoryHeader) + "\n";
  for (const auto& x : s) {
    out += fmt17(x.t) + "," + fmt17(x.Fx) + "," + fmt17(x.Fy) + "," + fmt17(x.Fz) + "," +
           fmt17(x.Fzz) + "," + fmt17(x.Azx) + "," + fmt17(x.Azy);
    if (master)
      out += "," + fmt17(x.rho_ee) + "," + fmt17(x.trace) + "," + fmt17(x.fid_dplus) + "," +
             fmt17(x.fid_dminus);
    else
      out += ",,,,";
    out += "\n";
  }
  return out;
}

json trajectory_json(const std::vector<tp_sample>& s, bool master) {
  json cols;
  std::vector<double> t, fx, fy, fz, fzz, azx, azy, ree, tr, fp, fm;
  for (const auto& x : s) {
    t.push_back(x.t);
    fx.push_back(x.Fx);
    fy.push_back(x.Fy);
    fz.push_back(x.Fz);
    fzz.push_back(x.Fzz);
    azx.push_back(x.Azx);
    azy.push_back(x.Azy);
    ree.push_back(x.rho_ee);
    tr.push_back(x.trace);
    fp.push_back(x.fid_dplus);
    fm.push_back(x.fid_dminus);
  }
  cols = {{"t", t}, {"Fx", fx}, {"Fy", fy}, {"Fz", fz}, {"Fzz", fzz}, {"Azx", azx}, {"Azy", azy}};
  if (master) {
    cols["rho_ee"] = ree;
    cols["trace"] = tr;
    cols["fid_dplus"] = fp;
    cols["fid_dminus"] = fm;
  }
  return cols;
}

namespace {

struct Panel {
  double x0, y0, size;
  std::string out;
};

void projection(Panel& p, const std::vector<tp_sample>& s, double tp_sample::*a, double tp_sample::*b,
                const char* la, const char* lb) {
  const double r = 0.42 * p.size;
  const double cx = p.x0 + p.size / 2, cy = p.y0 + p.size / 2;
  auto X = [&](double v) { return cx + r * v; };
  auto Y = [&](double v) { return cy - r * v; };
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"none\" stroke=\"#999\"/>\n"
                "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"#ccc\"/>\n",
                cx, cy, r, cx - r, cy, cx + r, cy);
  p.out += buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"#ccc\"/>\n",
                cx, cy - r, cx, cy + r);
  p.out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n",
                cx + r + 2, cy - 4, la, cx + 4, cy - r - 4, lb);
  p.out += buf;
  if (s.empty()) return;
  p.out += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
  for (const auto& x : s) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(x.*a), Y(x.*b));
    p.out += buf;
  }
  p.out += "\"/>\n";
  std::snprintf(buf, sizeof buf, "<circle class=\"start\" cx=\"%.3f\" cy=\"%.3f\" r=\"4\" fill=\"red\"/>\n",
                X(s.front().*a), Y(s.front().*b));
  p.out += buf;
  std::snprintf(buf, sizeof buf, "<circle class=\"end\" cx=\"%.3f\" cy=\"%.3f\" r=\"4\" fill=\"green\"/>\n",
                X(s.back().*a), Y(s.back().*b));
  p.out += buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace

std::string trajectory_svg(const std::vector<tp_sample>& s, const std::string& title) {
  const double size = 260;
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"310\" viewBox=\"0 0 800 310\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"10\" y=\"20\" font-size=\"14\">" + escape(title) + "</text>\n";
  Panel xy{10, 40, size, {}}, xz{270, 40, size, {}}, yz{530, 40, size, {}};
  projection(xy, s, &tp_sample::Fx, &tp_sample::Fy, "Fx", "Fy");
  projection(xz, s, &tp_sample::Fx, &tp_sample::Fz, "Fx", "Fz");
  projection(yz, s, &tp_sample::Fy, &tp_sample::Fz, "Fy", "Fz");
  out += "<g id=\"xy\">\n" + xy.out + "</g>\n<g id=\"xz\">\n" + xz.out + "</g>\n<g id=\"yz\">\n" + yz.out + "</g>\n";
  out += "</svg>\n";
  return out;
}

std::string scan_csv(const std::vector<ScanPoint>& pts) {
  std::string out = "value,Fz,t_read,ok\n";
  for (const auto& p : pts)
    out += fmt17(p.value) + "," + (p.ok ? fmt17(p.fz) : "") + "," + (p.ok ? fmt17(p.t_read) : "") +
           "," + (p.ok ? "1" : "0") + "\n";
  return out;
}

std::string scan_svg(const std::vector<ScanPoint>& pts, const std::string& xlabel) {
  const double W = 640, H = 360, L = 60, R = 20, T = 20, B = 50;
  double xmin = 0, xmax = 1, ymax = 0;
  if (!pts.empty()) {
    xmin = pts.front().value;
    xmax = pts.back().value;
  }
  if (xmax == xmin) xmax = xmin + 1;
  for (const auto& p : pts)
    if (p.ok) ymax = std::max(ymax, std::abs(p.fz));
  if (ymax == 0) ymax = 1;
  auto X = [&](double v) { return L + (W - L - R) * (v - xmin) / (xmax - xmin); };
  auto Y = [&](double v) { return T + (H - T - B) * (0.5 - 0.5 * v / ymax); };
  char buf[256];
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#999\"/>\n", L, Y(0), W - R, Y(0));
  out += buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#999\"/>\n", L, T, L, H - B);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"12\">%s</text>\n<text x=\"5\" y=\"%g\" font-size=\"12\">Fz</text>\n",
                W / 2, H - 15, escape(xlabel).c_str(), T + 10);
  out += buf;
  out += "<polyline fill=\"none\" stroke=\"#1f4e9c\" points=\"";
  for (const auto& p : pts) {
    if (!p.ok) continue;
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(p.value), Y(p.fz));
    out += buf;
  }
  out += "\"/>\n</svg>\n";
  return out;
}

}  // namespace tpcli
