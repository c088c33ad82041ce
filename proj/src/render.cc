#include "vesselpose/render.h"

#include <cstdio>
#include <sstream>

#include "vesselpose/error.h"

namespace vesselpose {
namespace {

std::string Line(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const char* cls,
                 const char* style) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "  <path class=\"%s\" d=\"M %.2f %.2f L %.2f %.2f\" %s/>\n", cls,
                a.x(), a.y(), b.x(), b.y(), style);
  return buf;
}

}  // namespace

std::string RenderSvg(std::span<const Annotation> annotations, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kConfig, "image size must be positive");
  constexpr const char* kEdge = "stroke=\"#1f4fff\" stroke-width=\"2\" stroke-dasharray=\"6 4\" fill=\"none\"";
  constexpr const char* kAxisStyle[3] = {
      "stroke=\"#e41a1c\" stroke-width=\"2\" fill=\"none\"",
      "stroke=\"#4daf4a\" stroke-width=\"2\" fill=\"none\"",
      "stroke=\"#984ea3\" stroke-width=\"2\" fill=\"none\""};
  constexpr const char* kAxisClass[3] = {"axis axis-x", "axis axis-y", "axis axis-z"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  for (const Annotation& a : annotations) {
    out << " <g data-mmsi=\"" << a.mmsi << "\" data-detection=\"" << a.detection_index << "\">\n";
    const auto& c = a.corners_px;
    for (int i = 0; i < 4; ++i) out << Line(c[i], c[(i + 1) % 4], "edge edge-bottom", kEdge);
    for (int i = 0; i < 4; ++i) out << Line(c[4 + i], c[4 + (i + 1) % 4], "edge edge-top", kEdge);
    for (int i = 0; i < 4; ++i) out << Line(c[i], c[i + 4], "edge edge-vertical", kEdge);
    for (int i = 0; i < 3; ++i) out << Line(a.axes_px[0], a.axes_px[i + 1], kAxisClass[i], kAxisStyle[i]);
    out << " </g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace vesselpose
