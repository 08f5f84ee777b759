#include <algorithm>
#include <iomanip>
#include <ostream>
#include <string>

#include "hetpart/engine.hpp"

namespace hetpart {

void write_trace_csv(const Trace& trace, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (const auto& r : trace.nodes) {
    out << "node," << r.node << ',' << r.device << ',' << r.start << ',' << r.end << '\n';
  }
  for (const auto& x : trace.transfers) {
    out << "xfer," << x.src << ',' << x.dst << ',' << x.start << ',' << x.end << ',' << x.mb
        << '\n';
  }
  out.precision(old_precision);
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_gantt_svg(const Trace& trace, const Graph& graph, std::ostream& out) {
  constexpr double kLaneHeight = 28.0;
  constexpr double kLabelWidth = 70.0;
  constexpr double kPlotWidth = 900.0;
  const int lanes = trace.active_cores + 2;  // GPU, cores, PCIe
  const double span = trace.makespan > 0.0 ? trace.makespan : 1.0;
  const double scale = kPlotWidth / span;
  const double height = kLaneHeight * lanes + 30.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kLabelWidth + kPlotWidth + 20
      << "\" height=\"" << height << "\" font-family=\"monospace\" font-size=\"11\">\n";
  auto lane_y = [&](int lane) { return 10.0 + lane * kLaneHeight; };
  for (int lane = 0; lane < lanes; ++lane) {
    std::string label = lane == 0 ? "GPU" : lane == lanes - 1 ? "PCIe" : "CPU" + std::to_string(lane);
    out << "<text x=\"4\" y=\"" << lane_y(lane) + 17 << "\">" << label << "</text>\n";
    out << "<line x1=\"" << kLabelWidth << "\" x2=\"" << kLabelWidth + kPlotWidth << "\" y1=\""
        << lane_y(lane) + kLaneHeight << "\" y2=\"" << lane_y(lane) + kLaneHeight
        << "\" stroke=\"#ddd\"/>\n";
  }
  for (const auto& r : trace.nodes) {
    const double x = kLabelWidth + r.start * scale;
    const double w = std::max(1.0, (r.end - r.start) * scale);
    const char* fill = r.device == kGpu ? "#7cb342" : "#42a5f5";
    out << "<rect x=\"" << x << "\" y=\"" << lane_y(r.device) + 3 << "\" width=\"" << w
        << "\" height=\"" << kLaneHeight - 6 << "\" fill=\"" << fill << "\" stroke=\"#333\">"
        << "<title>" << escape_xml(graph.name(r.node)) << " [" << r.start << ", " << r.end
        << "]</title></rect>\n";
    if (w > 24) {
      out << "<text x=\"" << x + 3 << "\" y=\"" << lane_y(r.device) + 18 << "\">"
          << escape_xml(graph.name(r.node)) << "</text>\n";
    }
  }
  for (const auto& t : trace.transfers) {
    const double x = kLabelWidth + t.start * scale;
    const double w = std::max(1.0, (t.end - t.start) * scale);
    out << "<rect x=\"" << x << "\" y=\"" << lane_y(lanes - 1) + 3 << "\" width=\"" << w
        << "\" height=\"" << kLaneHeight - 6 << "\" fill=\"#ffb74d\" stroke=\"#333\">"
        << "<title>" << t.src << "-&gt;" << t.dst << ' ' << t.mb << " MB</title></rect>\n";
  }
  out << "<text x=\"" << kLabelWidth << "\" y=\"" << height - 6 << "\">0</text>\n";
  out << "<text x=\"" << kLabelWidth + kPlotWidth - 80 << "\" y=\"" << height - 6 << "\">"
      << trace.makespan << " ms</text>\n";
  out << "</svg>\n";
}

}  // namespace hetpart
