#include "axdse/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "axdse/rng.hpp"

namespace axdse {

namespace {

// Reads the next PNM token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    break;
  }
  if (c == EOF) throw Error("unexpected end of PGM header");
  do {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  } while (c != EOF && !std::isspace(c) && c != '#');
  if (c == '#') in.unget();
  return tok;
}

int next_int(std::istream& in) {
  const std::string tok = next_token(in);
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw Error("malformed PGM header token '" + tok + "'");
  }
}

}  // namespace

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5")
    throw Error("unsupported PGM magic '" + magic + "' in " + path.string());
  Image img;
  img.width = next_int(in);
  img.height = next_int(in);
  const int maxval = next_int(in);
  if (img.width <= 0 || img.height <= 0)
    throw Error("invalid PGM dimensions in " + path.string());
  if (maxval <= 0 || maxval > 255)
    throw Error("only 8-bit PGM images are supported");
  const std::size_t n =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(n);
  if (magic == "P5") {
    // Single whitespace byte separates the header from the raster.
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      throw Error("truncated PGM raster in " + path.string());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = next_int(in);
      if (v < 0 || v > maxval) throw Error("PGM sample out of range");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void save_pgm(const Image& img, const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t n =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (img.pixels.size() != n) throw Error("image pixel buffer size mismatch");
  if (binary) {
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(n));
  } else {
    out << "P2\n" << img.width << ' ' << img.height << "\n255\n";
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        out << static_cast<int>(img.at(x, y)) << (x + 1 == img.width ? '\n' : ' ');
      }
    }
  }
}

Image synthetic_image(int width, int height, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw Error("image dimensions must be positive");
  Image img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  std::mt19937_64 rng(seed);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);

  // A few 3x3 box-blur passes turn the noise into smooth structure.
  Image tmp = img;
  for (int pass = 0; pass < 3; ++pass) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        int sum = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = std::clamp(x + dx, 0, width - 1);
            const int yy = std::clamp(y + dy, 0, height - 1);
            sum += img.at(xx, yy);
          }
        }
        tmp.at(x, y) = static_cast<std::uint8_t>(sum / 9);
      }
    }
    std::swap(img.pixels, tmp.pixels);
  }
  return img;
}

double ssim(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw Error("ssim requires images of identical dimensions");
  constexpr int kWin = 8;
  if (a.width < kWin || a.height < kWin)
    throw Error("image smaller than the 8x8 ssim window");
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  constexpr double kInvN = 1.0 / (kWin * kWin);

  double total = 0.0;
  std::size_t windows = 0;
  for (int y = 0; y + kWin <= a.height; ++y) {
    for (int x = 0; x + kWin <= a.width; ++x) {
      // Integer window sums are exact in double.
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int wy = 0; wy < kWin; ++wy) {
        for (int wx = 0; wx < kWin; ++wx) {
          const double va = a.at(x + wx, y + wy);
          const double vb = b.at(x + wx, y + wy);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      }
      const double mu_a = sa * kInvN;
      const double mu_b = sb * kInvN;
      const double var_a = saa * kInvN - mu_a * mu_a;
      const double var_b = sbb * kInvN - mu_b * mu_b;
      const double cov = sab * kInvN - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace axdse
