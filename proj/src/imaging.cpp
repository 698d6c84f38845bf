#include "eigencoin/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eigencoin/error.hpp"

namespace eigencoin {

GrayImage::GrayImage(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), pixels_(height * width, fill) {
  if (height == 0 || width == 0) {
    throw InvalidParameter("GrayImage: dimensions must be positive");
  }
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw InvalidParameter("GrayImage: fill value outside [0,1]");
  }
}

GrayImage::GrayImage(std::size_t height, std::size_t width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (height == 0 || width == 0) {
    throw InvalidParameter("GrayImage: dimensions must be positive");
  }
  if (pixels_.size() != height * width) {
    throw DimensionError("GrayImage: pixel count " + std::to_string(pixels_.size()) +
                         " does not match " + std::to_string(height) + "x" +
                         std::to_string(width));
  }
  for (double v : pixels_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidParameter("GrayImage: pixel value outside [0,1]");
    }
  }
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, bool fill)
    : height_(height), width_(width), bits_(height * width, fill ? 1 : 0) {}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

StructuringElement::StructuringElement(LineOrientation orientation, std::size_t length)
    : orientation_(orientation), length_(length) {
  if (length == 0 || length % 2 == 0) {
    throw InvalidParameter("StructuringElement: length must be odd and >= 1, got " +
                           std::to_string(length));
  }
}

void PreprocessConfig::validate() const {
  if (!(sobel_threshold >= 0.0 && sobel_threshold <= 1.0)) {
    throw InvalidParameter("preprocess.sobel_threshold must lie in [0,1]");
  }
  if (se_length == 0 || se_length % 2 == 0) {
    throw InvalidParameter("preprocess.se_length must be odd and >= 1");
  }
  if (normalized_size == 0) {
    throw InvalidParameter("preprocess.normalized_size must be positive");
  }
}

namespace {

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

}  // namespace

GrayImage sobel_magnitude(const GrayImage& img) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  std::vector<double> mag(h * w, 0.0);
  double peak = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t ru = clamp_index(static_cast<std::ptrdiff_t>(r) - 1, h);
    const std::size_t rd = clamp_index(static_cast<std::ptrdiff_t>(r) + 1, h);
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t cl = clamp_index(static_cast<std::ptrdiff_t>(c) - 1, w);
      const std::size_t cr = clamp_index(static_cast<std::ptrdiff_t>(c) + 1, w);
      const double gx = (img.at(ru, cr) + 2.0 * img.at(r, cr) + img.at(rd, cr)) -
                        (img.at(ru, cl) + 2.0 * img.at(r, cl) + img.at(rd, cl));
      const double gy = (img.at(rd, cl) + 2.0 * img.at(rd, c) + img.at(rd, cr)) -
                        (img.at(ru, cl) + 2.0 * img.at(ru, c) + img.at(ru, cr));
      const double m = std::sqrt(gx * gx + gy * gy);
      mag[r * w + c] = m;
      peak = std::max(peak, m);
    }
  }
  if (peak > 0.0) {
    for (double& m : mag) m = std::min(1.0, m / peak);
  }
  return GrayImage(h, w, std::move(mag));
}

BinaryMask threshold(const GrayImage& img, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidParameter("threshold: t must lie in [0,1]");
  }
  BinaryMask out(img.height(), img.width());
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      out.set(r, c, img.at(r, c) > t);
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  const auto rad = static_cast<std::ptrdiff_t>(se.radius());
  const bool vertical = se.orientation() == LineOrientation::Vertical;
  BinaryMask out(h, w);
  // Scatter each set pixel along the element; equivalent to the gather
  // definition because line elements are symmetric.
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      for (std::ptrdiff_t d = -rad; d <= rad; ++d) {
        const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r) + (vertical ? d : 0);
        const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c) + (vertical ? 0 : d);
        if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(h) ||
            cc >= static_cast<std::ptrdiff_t>(w)) {
          continue;
        }
        out.set(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc), true);
      }
    }
  }
  return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  BinaryMask outside(h, w);
  std::vector<Pixel> stack;
  auto seed = [&](std::size_t r, std::size_t c) {
    if (!mask.at(r, c) && !outside.at(r, c)) {
      outside.set(r, c, true);
      stack.push_back({r, c});
    }
  };
  for (std::size_t c = 0; c < w; ++c) {
    seed(0, c);
    seed(h - 1, c);
  }
  for (std::size_t r = 0; r < h; ++r) {
    seed(r, 0);
    seed(r, w - 1);
  }
  while (!stack.empty()) {
    const Pixel p = stack.back();
    stack.pop_back();
    if (p.row > 0) seed(p.row - 1, p.col);
    if (p.row + 1 < h) seed(p.row + 1, p.col);
    if (p.col > 0) seed(p.row, p.col - 1);
    if (p.col + 1 < w) seed(p.row, p.col + 1);
  }
  BinaryMask out(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      out.set(r, c, !outside.at(r, c));
    }
  }
  return out;
}

namespace {

class DisjointSet {
public:
  std::size_t make() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<Component> connected_components(const BinaryMask& mask) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> provisional(h * w, kNone);
  DisjointSet sets;

  // First pass: the already-visited half of the 8-neighborhood.
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      std::size_t label = kNone;
      auto visit = [&](std::size_t rr, std::size_t cc) {
        const std::size_t other = provisional[rr * w + cc];
        if (other == kNone) return;
        if (label == kNone) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      };
      if (c > 0) visit(r, c - 1);
      if (r > 0) {
        if (c > 0) visit(r - 1, c - 1);
        visit(r - 1, c);
        if (c + 1 < w) visit(r - 1, c + 1);
      }
      provisional[r * w + c] = label == kNone ? sets.make() : label;
    }
  }

  // Second pass: resolve roots, number them by first raster appearance.
  std::vector<Component> components;
  std::vector<std::size_t> root_to_index;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t p = provisional[r * w + c];
      if (p == kNone) continue;
      const std::size_t root = sets.find(p);
      if (root >= root_to_index.size()) root_to_index.resize(root + 1, kNone);
      if (root_to_index[root] == kNone) {
        root_to_index[root] = components.size();
        Component comp;
        comp.label = static_cast<int>(components.size()) + 1;
        comp.bbox = {r, r, c, c};
        components.push_back(std::move(comp));
      }
      Component& comp = components[root_to_index[root]];
      comp.pixels.push_back({r, c});
      comp.area += 1;
      comp.bbox.row_min = std::min(comp.bbox.row_min, r);
      comp.bbox.row_max = std::max(comp.bbox.row_max, r);
      comp.bbox.col_min = std::min(comp.bbox.col_min, c);
      comp.bbox.col_max = std::max(comp.bbox.col_max, c);
    }
  }
  return components;
}

GrayImage resize_bilinear(const GrayImage& img, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) {
    throw InvalidParameter("resize_bilinear: target dimensions must be positive");
  }
  const double sy = static_cast<double>(img.height()) / static_cast<double>(height);
  const double sx = static_cast<double>(img.width()) / static_cast<double>(width);
  const double max_y = static_cast<double>(img.height() - 1);
  const double max_x = static_cast<double>(img.width() - 1);
  std::vector<double> out(height * width);
  for (std::size_t r = 0; r < height; ++r) {
    const double fy = std::clamp((static_cast<double>(r) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
    const double ty = fy - static_cast<double>(y0);
    for (std::size_t c = 0; c < width; ++c) {
      const double fx = std::clamp((static_cast<double>(c) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
      const double tx = fx - static_cast<double>(x0);
      const double top = img.at(y0, x0) * (1.0 - tx) + img.at(y0, x1) * tx;
      const double bottom = img.at(y1, x0) * (1.0 - tx) + img.at(y1, x1) * tx;
      out[r * width + c] = std::clamp(top * (1.0 - ty) + bottom * ty, 0.0, 1.0);
    }
  }
  return GrayImage(height, width, std::move(out));
}

GrayImage rgb_to_gray(std::size_t height, std::size_t width, std::span<const unsigned char> rgb) {
  if (rgb.size() != height * width * 3) {
    throw DimensionError("rgb_to_gray: buffer size does not match 3*height*width");
  }
  std::vector<double> px(height * width);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double y = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
    px[i] = std::clamp(y / 255.0, 0.0, 1.0);
  }
  return GrayImage(height, width, std::move(px));
}

GrayImage extract_roi(const GrayImage& img, const PreprocessConfig& cfg) {
  cfg.validate();
  const GrayImage edges = sobel_magnitude(img);
  const BinaryMask edge_mask = threshold(edges, cfg.sobel_threshold);
  if (edge_mask.count() == 0) {
    throw SegmentationFailure("threshold", "extract_roi: no edge pixels above threshold");
  }
  const BinaryMask closed =
      dilate(dilate(edge_mask, StructuringElement(LineOrientation::Vertical, cfg.se_length)),
             StructuringElement(LineOrientation::Horizontal, cfg.se_length));
  const BinaryMask filled = fill_holes(closed);
  const std::vector<Component> comps = connected_components(filled);
  if (comps.empty()) {
    throw SegmentationFailure("connected_components", "extract_roi: no component found");
  }
  // Largest area wins; ties go to the lowest label.
  const Component& coin = *std::max_element(
      comps.begin(), comps.end(),
      [](const Component& a, const Component& b) { return a.area < b.area; });

  const BoundingBox& bb = coin.bbox;
  const std::size_t ch = bb.row_max - bb.row_min + 1;
  const std::size_t cw = bb.col_max - bb.col_min + 1;
  GrayImage crop(ch, cw, 0.0);
  for (const Pixel& p : coin.pixels) {
    crop.set(p.row - bb.row_min, p.col - bb.col_min, img.at(p.row, p.col));
  }
  return resize_bilinear(crop, cfg.normalized_size, cfg.normalized_size);
}

}  // namespace eigencoin
