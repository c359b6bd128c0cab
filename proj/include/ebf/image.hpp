#pragma once

// Row-major grayscale grid with binary PGM (P5, 8-bit) I/O; intensities map
// linearly to [0,1] as value/255.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebf {

struct ImageGrid {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;  // height*width, row-major

  ImageGrid() = default;
  ImageGrid(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, fill) {
    if (h <= 0 || w <= 0) throw std::invalid_argument("ImageGrid: bad shape");
  }

  int size() const { return height * width; }
  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
  double at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * width + c];
  }
};

namespace detail {
inline int pgm_next_int(std::istream& in) {
  // skips whitespace and '#' comment lines
  while (true) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) throw std::runtime_error("PGM: malformed header");
  return value;
}
}  // namespace detail

inline ImageGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("PGM: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("PGM: expected binary P5 in " + path);
  const int w = detail::pgm_next_int(in);
  const int h = detail::pgm_next_int(in);
  const int maxval = detail::pgm_next_int(in);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("PGM: unsupported header in " + path);
  in.get();  // single whitespace after maxval
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw std::runtime_error("PGM: truncated pixel data in " + path);
  ImageGrid img(h, w);
  for (std::size_t i = 0; i < raw.size(); ++i)
    img.pixels[i] = static_cast<double>(raw[i]) / maxval;
  return img;
}

inline void write_pgm(const ImageGrid& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("PGM: cannot write " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> raw(img.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(img.pixels[i], 0.0, 1.0);
    raw[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("PGM: write failed for " + path);
}

}  // namespace ebf
